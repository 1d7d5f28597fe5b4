#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "canids/detector.hpp"
#include "canids/error.hpp"
#include "canids/evaluate.hpp"
#include "canids/synth.hpp"

using namespace canids;

namespace {

SignalMatrix normalized_fixture(std::size_t samples, std::uint64_t seed) {
    const auto raw = make_benign_fixture(samples, 100.0, seed);
    return apply_normalization(raw, fit_normalization(raw));
}

DetectorConfig config_for(Method method) {
    DetectorConfig c;
    c.method = method;
    return c;
}

} // namespace

TEST_CASE("method names round-trip") {
    for (auto m : {Method::corr_distribution, Method::corr_correlation, Method::ganesan17, Method::moriano22})
        CHECK(method_from_string(method_name(m)) == m);
    CHECK_THROWS_AS((void)method_from_string("lstm"), Error);
}

TEST_CASE("fit payloads match the method") {
    const auto train = normalized_fixture(1200, 3);
    const WindowSpec spec{400, 100};

    const auto dist_model = fit(train, config_for(Method::corr_distribution), spec);
    CHECK(dist_model.u_train.size() == train.cols() * (train.cols() - 1) / 2);

    const auto moriano = fit(train, config_for(Method::moriano22), spec);
    CHECK(moriano.train_dendrogram.merges.size() == train.cols() - 1);
    CHECK(moriano.train_affinity.n == train.cols());

    const auto ganesan = fit(train, config_for(Method::ganesan17), spec);
    CHECK(std::isfinite(ganesan.error_mean));
    CHECK(ganesan.error_std >= 1e-9);
    CHECK(ganesan.signal_means.size() == train.cols());
    CHECK(ganesan.signal_stds.size() == train.cols());
}

TEST_CASE("fit on a 3-signal training matrix holds a length-3 triangle") {
    SignalMatrix train;
    train.rate_hz = 100.0;
    std::mt19937 rng(5);
    std::normal_distribution<double> dist;
    for (int c = 0; c < 3; ++c) {
        train.columns.push_back("s" + std::to_string(c));
        std::vector<double> col(64);
        for (auto& v : col) v = dist(rng);
        train.values.push_back(col);
    }
    const auto model = fit(train, config_for(Method::corr_distribution), {8, 4});
    CHECK(model.u_train.size() == 3);
}

TEST_CASE("fit validates its preconditions") {
    const auto train = normalized_fixture(300, 4);
    CHECK_THROWS_AS((void)fit(train, config_for(Method::corr_distribution), {400, 100}), Error);

    SignalMatrix one_signal;
    one_signal.rate_hz = 100.0;
    one_signal.columns = {"only"};
    one_signal.values = {std::vector<double>(500, 1.0)};
    CHECK_THROWS_AS((void)fit(one_signal, config_for(Method::moriano22), {100, 50}), Error);

    DetectorConfig bad = config_for(Method::moriano22);
    bad.alpha = 1.5;
    CHECK_THROWS_AS((void)fit(train, bad, {100, 50}), Error);
}

TEST_CASE("ganesan two-signal calibration is the floored degenerate case") {
    // A 2-signal stream clusters into one pair per window; a single pair has
    // zero deviation, so every training window error is 0 and sigma hits the
    // floor. Scoring any window then lands exactly on the CDF midpoint.
    SignalMatrix train;
    train.rate_hz = 100.0;
    train.columns = {"a", "b"};
    std::vector<double> x(1000), y(1000);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = std::sin(0.01 * static_cast<double>(i));
        y[i] = 0.9 * x[i] + 0.1 * std::sin(0.5 + 0.02 * static_cast<double>(i));
    }
    train.values = {x, y};
    const auto model = fit(train, config_for(Method::ganesan17), {400, 100});
    CHECK(model.error_mean == 0.0);
    CHECK(model.error_std == 1e-9);

    GanesanState state;
    const auto views = enumerate_windows(train.rows(), {400, 100}, 100.0, 0.0);
    const auto score = score_ganesan17(model, slice(train, views[0]), state);
    CHECK(score.score == doctest::Approx(0.5));
}

TEST_CASE("ganesan hand-built cluster error") {
    // Cluster {0,1,2} with pair correlations {0.9, 0.9, 0.3}; signal 3 is
    // anticorrelated with everything and stays out of the cluster.
    // mean = 0.7, population sigma = sqrt(0.08), max deviation 0.4 -> sqrt(2).
    CorrelationMatrix r(4);
    for (std::size_t i = 0; i < 4; ++i) r.at(i, i) = 1.0;
    auto set = [&](std::size_t i, std::size_t j, double v) {
        r.at(i, j) = v;
        r.at(j, i) = v;
    };
    set(0, 1, 0.9);
    set(0, 2, 0.9);
    set(1, 2, 0.3);
    set(0, 3, -0.9);
    set(1, 3, -0.9);
    set(2, 3, -0.9);
    CHECK(ganesan_window_error(r, 1.0, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("ganesan window error is zero without multi-member clusters") {
    CorrelationMatrix r(3);
    for (std::size_t i = 0; i < 3; ++i) r.at(i, i) = 1.0;
    // all correlations far below the eps=1 edge threshold (r >= 0.5)
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j) {
            r.at(i, j) = -0.5;
            r.at(j, i) = -0.5;
        }
    CHECK(ganesan_window_error(r, 1.0, 1) == 0.0);
}

TEST_CASE("scoring the training matrix as a window gives near-zero scores") {
    // Window identical to the full training matrix: U_test == U_train.
    const auto train = normalized_fixture(500, 9);
    const WindowSpec spec{500, 500};

    auto model = fit(train, config_for(Method::corr_distribution), spec);
    const auto views = enumerate_windows(train.rows(), spec, 100.0, 0.0);
    const auto block = slice(train, views[0]);
    CHECK(score_corr_distribution(model, block).score == doctest::Approx(0.0).epsilon(1e-9));

    model = fit(train, config_for(Method::corr_correlation), spec);
    CHECK(score_corr_correlation(model, block).score == doctest::Approx(0.0).epsilon(1e-12));

    model = fit(train, config_for(Method::moriano22), spec);
    CHECK(score_moriano22(model, block).score == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("benign windows score low for corr-distribution on average") {
    const auto train = normalized_fixture(6000, 12);
    const WindowSpec spec{200, 200};
    const auto model = fit(train, config_for(Method::corr_distribution), spec);
    const auto scores = score_capture(model, train, spec);
    double mean = 0.0;
    for (const auto& s : scores) mean += s.score;
    mean /= static_cast<double>(scores.size());
    CHECK(mean < 0.5);
}

TEST_CASE("decorrelate injection raises scores above the matched benign window") {
    const auto raw_train = make_benign_fixture(6000, 100.0, 21);
    const auto raw_test = make_benign_fixture(3000, 100.0, 22);
    const auto params = fit_normalization(raw_train);
    const auto train = apply_normalization(raw_train, params);

    InjectionSpec inj;
    inj.signal_id = "s0";
    inj.t_start = 5.0;
    inj.t_end = 25.0;
    inj.mode = InjectMode::decorrelate;
    inj.seed = 99;
    GroundTruth truth;
    const auto attacked_raw = inject(raw_test, inj, &params, truth);
    const auto benign = apply_normalization(raw_test, params);
    const auto attacked = apply_normalization(attacked_raw, params);

    const WindowSpec spec{200, 200};
    // window index 6 covers [10s, 12s), fully inside the injection
    const std::size_t target = 6;
    for (auto method : {Method::corr_distribution, Method::corr_correlation, Method::moriano22}) {
        const auto model = fit(train, config_for(method), spec);
        const auto benign_scores = score_capture(model, benign, spec);
        const auto attacked_scores = score_capture(model, attacked, spec);
        CHECK(attacked_scores[target].score > benign_scores[target].score);
    }
}

TEST_CASE("constant-max injection raises the moriano score over the matched benign window") {
    const auto raw_train = make_benign_fixture(6000, 100.0, 23);
    const auto raw_test = make_benign_fixture(3000, 100.0, 24);
    const auto params = fit_normalization(raw_train);
    const auto train = apply_normalization(raw_train, params);

    InjectionSpec inj;
    inj.signal_id = "s2";
    inj.t_start = 8.0;
    inj.t_end = 22.0;
    inj.mode = InjectMode::constant_max;
    GroundTruth truth;
    const auto attacked = apply_normalization(inject(raw_test, inj, &params, truth), params);
    const auto benign = apply_normalization(raw_test, params);

    const WindowSpec spec{200, 200};
    const auto model = fit(train, config_for(Method::moriano22), spec);
    const auto benign_scores = score_capture(model, benign, spec);
    const auto attacked_scores = score_capture(model, attacked, spec);
    const std::size_t inside = 7; // window [12s, 14s), fully injected
    CHECK(attacked_scores[inside].score > benign_scores[inside].score);
}

TEST_CASE("scores are deterministic across repeated runs") {
    const auto train = normalized_fixture(2000, 31);
    const auto test = normalized_fixture(1000, 32);
    const WindowSpec spec{200, 100};
    for (auto method :
         {Method::corr_distribution, Method::corr_correlation, Method::ganesan17, Method::moriano22}) {
        const auto model = fit(train, config_for(method), spec);
        const auto first = score_capture(model, test, spec);
        const auto second = score_capture(model, test, spec);
        REQUIRE(first.size() == second.size());
        for (std::size_t i = 0; i < first.size(); ++i) CHECK(first[i].score == second[i].score);
    }
}

TEST_CASE("raw affine rescaling leaves every detector's scores unchanged") {
    const auto raw = make_benign_fixture(2000, 100.0, 41);
    auto scaled = raw;
    for (std::size_t c = 0; c < scaled.cols(); ++c) {
        const double a = 1.5 + 0.25 * static_cast<double>(c);
        const double b = -40.0 + 11.0 * static_cast<double>(c);
        for (auto& v : scaled.values[c]) v = a * v + b;
    }
    const auto base = apply_normalization(raw, fit_normalization(raw));
    const auto mapped = apply_normalization(scaled, fit_normalization(scaled));

    const WindowSpec spec{250, 250};
    for (auto method :
         {Method::corr_distribution, Method::corr_correlation, Method::ganesan17, Method::moriano22}) {
        const auto model_a = fit(base, config_for(method), spec);
        const auto model_b = fit(mapped, config_for(method), spec);
        const auto sa = score_capture(model_a, base, spec);
        const auto sb = score_capture(model_b, mapped, spec);
        REQUIRE(sa.size() == sb.size());
        for (std::size_t i = 0; i < sa.size(); ++i) CHECK(std::abs(sa[i].score - sb[i].score) < 1e-9);
    }
}

TEST_CASE("signal permutation invariance") {
    const auto train = normalized_fixture(1500, 51);
    const auto test = normalized_fixture(900, 52);
    std::mt19937 rng(53);
    std::vector<std::size_t> perm(train.cols());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);

    auto permute = [&](const SignalMatrix& m) {
        SignalMatrix out = m;
        for (std::size_t c = 0; c < m.cols(); ++c) {
            out.columns[c] = m.columns[perm[c]];
            out.values[c] = m.values[perm[c]];
        }
        return out;
    };
    const auto train_p = permute(train);
    const auto test_p = permute(test);

    const WindowSpec spec{300, 150};
    // Mann-Whitney treats the triangle as a multiset: exactly invariant.
    {
        const auto model = fit(train, config_for(Method::corr_distribution), spec);
        const auto model_p = fit(train_p, config_for(Method::corr_distribution), spec);
        const auto a = score_capture(model, test, spec);
        const auto b = score_capture(model_p, test_p, spec);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].score == b[i].score);
    }
    // Spearman pairs the two triangles entry-by-entry: invariant because both
    // sides are permuted by the same signal permutation.
    {
        const auto model = fit(train, config_for(Method::corr_correlation), spec);
        const auto model_p = fit(train_p, config_for(Method::corr_correlation), spec);
        const auto a = score_capture(model, test, spec);
        const auto b = score_capture(model_p, test_p, spec);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].score == doctest::Approx(b[i].score).epsilon(1e-12));
    }
}

TEST_CASE("ganesan state refuses out-of-order windows") {
    const auto train = normalized_fixture(1000, 61);
    const WindowSpec spec{200, 100};
    const auto model = fit(train, config_for(Method::ganesan17), spec);
    const auto views = enumerate_windows(train.rows(), spec, 100.0, 0.0);

    GanesanState state;
    auto first = score_window(model, slice(train, views[0]), &state);
    CHECK(state.next_index() == 2);
    CHECK(state.history().size() == 1);
    try {
        state.record(7, 0.0);
        FAIL("expected state error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::state);
    }
    CHECK_THROWS_AS((void)score_window(model, slice(train, views[0]), nullptr), Error);
}

TEST_CASE("moriano scores stay in range on arbitrary windows") {
    const auto train = normalized_fixture(2000, 71);
    const auto test = normalized_fixture(1200, 72);
    const WindowSpec spec{150, 75};
    const auto model = fit(train, config_for(Method::moriano22), spec);
    for (const auto& s : score_capture(model, test, spec)) {
        CHECK(s.score >= 0.0);
        CHECK(s.score <= 1.0);
    }
}

TEST_CASE("degenerate windows never throw") {
    // Every signal constant inside the window: correlations all zeroed.
    SignalMatrix train = normalized_fixture(1000, 81);
    const WindowSpec spec{100, 100};
    SignalMatrix flat;
    flat.rate_hz = 100.0;
    flat.columns = train.columns;
    for (std::size_t c = 0; c < train.cols(); ++c)
        flat.values.push_back(std::vector<double>(200, static_cast<double>(c)));

    {
        const auto model = fit(train, config_for(Method::corr_distribution), spec);
        const auto scores = score_capture(model, flat, spec);
        for (const auto& s : scores) CHECK(std::isfinite(s.score));
    }
    {
        const auto model = fit(train, config_for(Method::corr_correlation), spec);
        const auto scores = score_capture(model, flat, spec);
        for (const auto& s : scores) {
            CHECK(s.score == 1.0); // no rank structure at all
            CHECK(s.degenerate);
        }
    }
    {
        const auto model = fit(train, config_for(Method::ganesan17), spec);
        const auto scores = score_capture(model, flat, spec);
        for (const auto& s : scores) CHECK(std::isfinite(s.score));
    }
}

TEST_CASE("model and method must match") {
    const auto train = normalized_fixture(800, 91);
    const WindowSpec spec{200, 100};
    const auto model = fit(train, config_for(Method::corr_distribution), spec);
    const auto views = enumerate_windows(train.rows(), spec, 100.0, 0.0);
    CHECK_THROWS_AS((void)score_moriano22(model, slice(train, views[0])), Error);
}

TEST_CASE("score stream jsonl round-trips") {
    const auto train = normalized_fixture(1000, 95);
    const WindowSpec spec{200, 100};
    const auto model = fit(train, config_for(Method::corr_distribution), spec);
    const auto scores = score_capture(model, train, spec);
    const auto path = std::filesystem::temp_directory_path() / "canids_scores_roundtrip.jsonl";
    write_scores_jsonl(scores, path.string());
    const auto back = read_scores_jsonl(path.string());
    REQUIRE(back.size() == scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        CHECK(back[i].window_index == scores[i].window_index);
        CHECK(back[i].score == scores[i].score);
        CHECK(back[i].duration_ns == scores[i].duration_ns);
    }
    std::filesystem::remove(path);
}
