#include <catch_amalgamated.hpp>

#include <random>

#include "ftcal/model.hpp"

using namespace ftcal;

namespace {

ModelSpec basic_spec(int np, int nu) {
    ModelSpec s;
    s.np = np;
    s.ny = 6;
    s.nu = nu;
    return s;
}

}  // namespace

TEST_CASE("offset-only prediction") {
    auto m = CalibrationModel::empty(basic_spec(1, 6));
    for (int i = 0; i < 6; ++i) m.coefficients[i][0] = i + 1;
    Wrench y = m.predict({0, 0, 0, 0, 0, 0});
    for (int i = 0; i < 6; ++i) CHECK(y[i] == i + 1);
}

TEST_CASE("affine identity on the first six channels ignores temperature") {
    auto m = CalibrationModel::empty(basic_spec(1, 7));
    // columns: [constant, u1..u7]; set C = I on the gauge channels
    for (int i = 0; i < 6; ++i) m.coefficients[i][1 + i] = 1.0;
    Wrench y = m.predict({10, 20, 30, 40, 50, 60, 37.5});
    for (int i = 0; i < 6; ++i) CHECK(y[i] == (i + 1) * 10.0);
}

TEST_CASE("quadratic prediction against term-by-term oracle") {
    ModelSpec spec = basic_spec(2, 2);
    auto m = CalibrationModel::empty(spec);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-2, 2);
    for (int i = 0; i < 6; ++i)
        for (Eigen::Index j = 0; j < m.coefficients[i].size(); ++j)
            m.coefficients[i][j] = dist(rng);
    RawSample u = {2, 3};
    Wrench y = m.predict(u);
    for (int i = 0; i < 6; ++i) {
        double expect = 0;
        for (std::size_t c = 0; c < m.columns.size(); ++c) {
            const auto& col = m.columns[c];
            double phi = col.kind == Column::Kind::Constant
                             ? 1.0
                             : m.monomials[col.monomial].eval(u);
            expect += m.coefficients[i][static_cast<Eigen::Index>(c)] * phi;
        }
        CHECK(y[i] == Catch::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("affine equivalence with explicit matrix arithmetic") {
    auto m = CalibrationModel::empty(basic_spec(1, 6));
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> dist(-1, 1);
    for (int i = 0; i < 6; ++i)
        for (Eigen::Index j = 0; j < m.coefficients[i].size(); ++j)
            m.coefficients[i][j] = dist(rng);
    auto [C, o] = m.affine_view();
    for (int trial = 0; trial < 20; ++trial) {
        RawSample u(6);
        Eigen::VectorXd uv(6);
        for (int l = 0; l < 6; ++l) uv(l) = u[l] = dist(rng) * 100;
        Wrench y = m.predict(u);
        Eigen::VectorXd ref = C * uv + o;
        for (int i = 0; i < 6; ++i) CHECK(std::abs(y[i] - ref(i)) < 1e-12 * (1 + std::abs(ref(i))));
    }
}

TEST_CASE("prediction is deterministic") {
    auto m = CalibrationModel::empty(basic_spec(3, 6));
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> dist(-1, 1);
    for (int i = 0; i < 6; ++i)
        for (Eigen::Index j = 0; j < m.coefficients[i].size(); ++j)
            m.coefficients[i][j] = dist(rng);
    RawSample u = {1.5, -2.25, 3.125, 0.75, -0.5, 10};
    Wrench a = m.predict(u);
    Wrench b = m.predict(u);
    CHECK(a == b);
}

TEST_CASE("predict width mismatch and missing history") {
    auto m = CalibrationModel::empty(basic_spec(1, 6));
    CHECK_THROWS_AS(m.predict({1, 2, 3}), ShapeError);

    ModelSpec arx = basic_spec(1, 6);
    arx.na = 1;
    auto ma = CalibrationModel::empty(arx);
    CHECK_THROWS_AS(ma.predict({1, 2, 3, 4, 5, 6}), InsufficientDataError);
    History h;
    h.outputs.push_back(Wrench{});
    CHECK_NOTHROW(ma.predict({1, 2, 3, 4, 5, 6}, &h));
}

TEST_CASE("count_effective") {
    auto m = CalibrationModel::empty(basic_spec(1, 6));
    CHECK(count_effective(m, 1e-9) == 0);
    m.coefficients[0][0] = 1;
    m.coefficients[0][1] = 1e-12;
    m.coefficients[0][2] = -0.5;
    CHECK(count_effective(m, 1e-9) == 2);
    CHECK_THROWS_AS(count_effective(m, -1), SpecError);
}

TEST_CASE("prune") {
    auto m = CalibrationModel::empty(basic_spec(1, 6));
    m.coefficients[0][0] = 1;
    m.coefficients[0][1] = 1e-12;
    auto same = prune(m, 0);
    CHECK(same.coefficients[0][1] == 1e-12);
    auto cut = prune(m, 1e-9);
    CHECK(cut.coefficients[0][1] == 0);
    CHECK(cut.coefficients[0][0] == 1);
    auto all = prune(m, std::numeric_limits<double>::infinity());
    CHECK(count_effective(all, 0) == 0);
}

TEST_CASE("serialize round-trip is bit-exact") {
    for (int np : {1, 4}) {
        auto m = CalibrationModel::empty(basic_spec(np, 7));
        std::mt19937_64 rng(123 + np);
        std::uniform_real_distribution<double> dist(-1, 1);
        for (int i = 0; i < 6; ++i)
            for (Eigen::Index j = 0; j < m.coefficients[i].size(); ++j)
                m.coefficients[i][j] = dist(rng) * std::exp(dist(rng) * 10);
        m.metadata.dataset_hash = "deadbeef";
        m.metadata.solver_warnings = {"example warning"};

        auto doc = serialize(m);
        auto text = doc.dump();  // through text, as on disk
        auto m2 = deserialize(nlohmann::json::parse(text));

        REQUIRE(m2.coefficients.size() == m.coefficients.size());
        for (int i = 0; i < 6; ++i)
            for (Eigen::Index j = 0; j < m.coefficients[i].size(); ++j)
                CHECK(m2.coefficients[i][j] == m.coefficients[i][j]);
        CHECK(m2.monomials == m.monomials);
        CHECK(m2.metadata.dataset_hash == "deadbeef");
        CHECK(m2.metadata.solver_warnings == m.metadata.solver_warnings);
    }
}

TEST_CASE("deserialize rejects malformed documents") {
    auto m = CalibrationModel::empty(basic_spec(1, 6));
    auto doc = serialize(m);

    SECTION("wrong coefficient array length") {
        doc["coefficients"][0] = std::vector<double>{1, 2};
        CHECK_THROWS_AS(deserialize(doc), ShapeError);
    }
    SECTION("missing schema version") {
        doc.erase("schema_version");
        CHECK_THROWS_AS(deserialize(doc), ParseError);
    }
    SECTION("future schema version") {
        doc["schema_version"] = 99;
        CHECK_THROWS_AS(deserialize(doc), VersionError);
    }
    SECTION("missing spec") {
        doc.erase("spec");
        CHECK_THROWS_AS(deserialize(doc), ParseError);
    }
}
