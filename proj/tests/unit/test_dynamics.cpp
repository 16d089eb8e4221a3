/*
* Copyright (C) 2026 riskctl contributors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#include "riskctl/dynamics.hpp"
#include "riskctl/error.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace riskctl;

namespace
{

Eigen::VectorXd vec(std::initializer_list<double> v)
{
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) {
        out[i++] = x;
    }
    return out;
}

RiskNetwork single(double p_int, double p_con)
{
    return build_network({"a"}, vec({p_int}), vec({0.0}), vec({p_con}), Eigen::MatrixXd::Zero(1, 1));
}

RiskNetwork chain()
{
    Eigen::MatrixXd e(2, 2);
    e << 0, 1, 0, 0;
    return build_network({"a", "b"}, vec({0.1, 0.0}), vec({0.0, 0.5}), vec({0.5, 0.5}), e);
}

ErrorCode code_of(auto&& fn)
{
    try {
        fn();
    }
    catch (const Error& e) {
        return e.code();
    }
    FAIL("expected riskctl::Error");
    return ErrorCode::InvalidArgument;
}

} // namespace

TEST_CASE("step_continuous examples")
{
    std::mt19937_64 rng(1);
    auto net = testing::random_network(rng, 4);
    net = build_network(net.names(), Eigen::VectorXd::Zero(4), net.p_ext(), net.p_con(), net.adjacency());
    CHECK(step_continuous(net, StateVector::zeros(4)).state.values().isZero());

    const auto c = chain();
    const auto step = step_continuous(c, StateVector::continuous(vec({1, 0})), Eigen::VectorXd::Zero(2), DriverSet({0}, 2));
    CHECK(step.state.values() == vec({0.5, 0.5}));
    CHECK(step.saturation_count() == 0);
}

TEST_CASE("step_continuous flags clamping and ignores undriven signals")
{
    const auto c = chain();
    const auto x = StateVector::continuous(vec({0.5, 0.5}));
    const auto pushed = step_continuous(c, x, vec({-5.0, 3.0}), DriverSet({0}, 2));
    CHECK(pushed.state[0] == 0.0);
    CHECK(pushed.saturated[0]);
    // node 1 is not driven, its signal is ignored
    CHECK(pushed.state[1] == doctest::Approx(step_continuous(c, x).state[1]));
    CHECK_FALSE(pushed.saturated[1]);

    const auto up = step_continuous(c, x, vec({5.0, 0.0}), DriverSet({0, 1}, 2));
    CHECK(up.state[0] == 1.0);
    CHECK(up.saturation_count() == 1);
}

TEST_CASE("step_continuous maps the unit cube into itself for any signal")
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 2.0);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + static_cast<std::size_t>(t % 7);
        const auto net = testing::random_network(rng, n, 0.6);
        const auto x   = testing::random_interior_state(rng, n);
        Eigen::VectorXd u(static_cast<Eigen::Index>(n));
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            u[i] = g(rng);
        }
        const auto next = step_continuous(net, StateVector::continuous(x), u, DriverSet::all(n)).state.values();
        CHECK((next.array() >= 0.0).all());
        CHECK((next.array() <= 1.0).all());
    }
}

TEST_CASE("find_steady_state examples")
{
    const auto xs = find_steady_state(single(0.1, 0.7));
    CHECK(std::abs(xs[0] - 0.25) <= 1e-10);

    std::mt19937_64 rng(5);
    auto net = testing::random_network(rng, 5);
    const Eigen::VectorXd z = Eigen::VectorXd::Zero(5);
    const auto quiet = build_network(net.names(), z, net.p_ext(), net.p_con(), Eigen::MatrixXd::Zero(5, 5));
    CHECK(find_steady_state(quiet).values().isZero());

    // identity dynamics need the external channel off as well
    const auto frozen = build_network(net.names(), z, z, Eigen::VectorXd::Ones(5), net.adjacency());
    const auto v      = StateVector::continuous(vec({0.2, 0.9, 0.0, 1.0, 0.4}));
    CHECK(find_steady_state(frozen, v).values() == v.values());
}

TEST_CASE("find_steady_state is a fixed point of one more step")
{
    std::mt19937_64 rng(6);
    for (int t = 0; t < 50; ++t) {
        const auto net = testing::random_network(rng, 6, 0.4, 0.3);
        SteadyStateOptions opts;
        opts.tol = 1e-11;
        const auto xs = find_steady_state(net, opts);
        const auto again = step_continuous(net, xs).state.values();
        CHECK((again - xs.values()).cwiseAbs().maxCoeff() <= opts.tol);
    }
}

TEST_CASE("find_steady_state: oscillation needs damping")
{
    // x' = 1 - x alternates 0, 1, 0, ... from zero
    const auto flip = single(1.0, 0.0);
    SteadyStateOptions opts;
    opts.max_iter = 1000;
    CHECK(code_of([&] { find_steady_state(flip, opts); }) == ErrorCode::NoConvergence);
    opts.damping = 0.5;
    CHECK(find_steady_state(flip, opts)[0] == doctest::Approx(0.5));

    opts.damping = 0.0;
    CHECK(code_of([&] { find_steady_state(flip, opts); }) == ErrorCode::InvalidArgument);
    opts.damping = 1.0;
    opts.tol     = 0.0;
    CHECK(code_of([&] { find_steady_state(flip, opts); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("find_steady_state holds pinned nodes")
{
    const auto c = chain();
    SteadyStateOptions opts;
    opts.pinned = {{0, 1.0}};
    const auto xs = find_steady_state(c, opts);
    CHECK(xs[0] == 1.0);
    // b: x = 0.5 (1 - x) + 0.5 x  ->  0.5
    CHECK(xs[1] == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("jacobian closed forms")
{
    for (double x : {0.0, 0.3, 0.9}) {
        const auto a = jacobian(single(0.1, 0.7), StateVector::continuous(vec({x})));
        CHECK(a(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
    }
    std::mt19937_64 rng(9);
    const auto net = testing::random_network(rng, 5, 0.5, 0.1);
    const auto decoupled =
        build_network(net.names(), net.p_int(), net.p_ext(), net.p_con(), Eigen::MatrixXd::Zero(5, 5));
    const auto a = jacobian(decoupled, StateVector::continuous(testing::random_interior_state(rng, 5)));
    CHECK(a.isApprox(Eigen::MatrixXd((net.p_con() - net.p_int()).asDiagonal())));
}

TEST_CASE("jacobian matches central finite differences")
{
    std::mt19937_64 rng(10);
    int checked = 0;
    while (checked < 40) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng() % 8);
        const auto net = testing::random_network(rng, n, 0.4, 0.4);
        const auto x   = testing::random_interior_state(rng, n);
        const auto state = StateVector::continuous(x);
        const auto raw = activity_map(net, x);
        if ((raw.array() < 0.0).any() || (raw.array() > 1.0).any()) {
            CHECK(code_of([&] { jacobian(net, state); }) == ErrorCode::SaturatedPoint);
            continue;
        }
        const auto diff = (jacobian(net, state) - testing::finite_difference_jacobian(net, x)).cwiseAbs().maxCoeff();
        CHECK(diff <= 1e-6);
        ++checked;
    }
}

TEST_CASE("linearize packages the jacobian")
{
    const auto c  = chain();
    const auto xs = find_steady_state(c);
    const auto sys = linearize(c, DriverSet({0}, 2), xs);
    CHECK(sys.a == jacobian(c, xs));
    CHECK(sys.x_lin.values() == xs.values());
    CHECK(sys.driver.matrix() == DriverSet({0}, 2).matrix());
    CHECK_THROWS_AS(linearize(c, DriverSet({0}, 3), xs), Error);
}

TEST_CASE("controllability_rank examples")
{
    const auto one = single(0.1, 0.7);
    CHECK(controllability_rank(linearize(one, DriverSet({0}, 1), find_steady_state(one))) == 1);

    const auto c   = chain();
    const auto sys = linearize(c, DriverSet({0}, 2), find_steady_state(c));
    REQUIRE(sys.a(1, 0) != 0.0);
    CHECK(controllability_rank(sys) == 2);
    // driving the sink cannot reach the source
    CHECK(controllability_rank(linearize(c, DriverSet({1}, 2), find_steady_state(c))) == 1);

    LinearizedSystem diag{Eigen::Vector2d(0.3, 0.6).asDiagonal(), StateVector::zeros(2), DriverSet({0}, 2)};
    CHECK(controllability_rank(diag) == 1);
    diag.driver = DriverSet::all(2);
    CHECK(controllability_rank(diag) == 2);
}

TEST_CASE("controllability_rank is invariant under node relabeling")
{
    std::mt19937_64 rng(12);
    for (int t = 0; t < 40; ++t) {
        const std::size_t n = 3 + static_cast<std::size_t>(t % 5);
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            for (Eigen::Index j = 0; j < a.cols(); ++j) {
                if (rng() % 3 == 0) {
                    a(i, j) = u(rng);
                }
            }
        }
        std::vector<std::size_t> drivers{0};
        if (t % 2 == 0) {
            drivers.push_back(n - 1);
        }
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        Eigen::PermutationMatrix<Eigen::Dynamic> p(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            p.indices()[static_cast<Eigen::Index>(i)] = static_cast<int>(perm[i]);
        }
        std::vector<std::size_t> permuted;
        for (auto d : drivers) {
            permuted.push_back(perm[d]);
        }
        const LinearizedSystem original{a, StateVector::zeros(n), DriverSet(drivers, n)};
        const LinearizedSystem relabeled{p * a * p.transpose(), StateVector::zeros(n), DriverSet(permuted, n)};
        CHECK(controllability_rank(original) == controllability_rank(relabeled));
    }
}
