#include "pspin/langevin.hpp"

#include <cmath>

#include "pspin/rng.hpp"

namespace pspin {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace

int SimConfig::n_steps() const {
    return static_cast<int>(std::llround(T / dt));
}

int SimConfig::n_snapshots() const {
    return n_steps() / snapshot_stride + 1;
}

void SimConfig::validate() const {
    if (dt <= 0.0) throw std::invalid_argument("sim: dt must be > 0");
    if (T < 0.0) throw std::invalid_argument("sim: T must be >= 0");
    if (snapshot_stride < 1) throw std::invalid_argument("sim: snapshot_stride must be >= 1");
    if (n_realizations < 1) throw std::invalid_argument("sim: need at least one realization");
    const double steps = T / dt;
    if (std::abs(steps - std::llround(steps)) > 1e-6)
        throw std::invalid_argument("sim: T must be an integer multiple of dt");
    if (n_steps() % snapshot_stride != 0)
        throw std::invalid_argument("sim: step count must be a multiple of snapshot_stride");
    if (init == InitKind::IidGaussian && init_variance <= 0.0)
        throw std::invalid_argument("sim: init variance must be > 0");
}

double TrajectoryState::K_N() const {
    return dot(x, x) / static_cast<double>(x.size());
}

TrajectoryState init_state(const SimConfig& config, int N, std::uint64_t seed) {
    TrajectoryState st;
    st.rng = make_engine(seed);
    st.x.resize(static_cast<std::size_t>(N));
    st.B.assign(static_cast<std::size_t>(N), 0.0);
    st.t = 0.0;
    for (auto& xi : st.x) xi = st.gauss(st.rng);
    if (config.init == InitKind::UniformSphere) {
        double nrm2 = dot(st.x, st.x);
        const double scale = std::sqrt(static_cast<double>(N) / nrm2);
        for (auto& xi : st.x) xi *= scale;
    } else {
        const double sd = std::sqrt(config.init_variance);
        for (auto& xi : st.x) xi *= sd;
    }
    return st;
}

void euler_maruyama_step(TrajectoryState& state, const ModelSpec& model,
                         const DisorderTensor& J, double dt, double noise_scale) {
    const int N = model.N;
    const double fp = model.confinement.f_prime(state.K_N());
    std::vector<double> g = grad_field(model, J, state.x);
    const double sqdt = std::sqrt(dt) * noise_scale;
    for (int i = 0; i < N; ++i) {
        const double xi = state.gauss(state.rng);
        const std::size_t k = static_cast<std::size_t>(i);
        state.x[k] += (g[k] - fp * state.x[k]) * dt + sqdt * xi;
        state.B[k] += sqdt * xi;
    }
    state.t += dt;
}

EmpiricalObservables run_trajectory(const ModelSpec& model, const DisorderTensor& J,
                                    const SimConfig& config, int realization_index) {
    config.validate();
    const int N = model.N;
    const int steps = config.n_steps();
    const int M = config.n_snapshots();

    TrajectoryState st = init_state(config, N,
        derive_seed(config.base_seed, SeedStream::Trajectory,
                    static_cast<std::uint64_t>(realization_index)));

    const double threshold =
        config.blowup_threshold > 0.0 ? config.blowup_threshold
                                      : 50.0 * std::max(1.0, st.K_N());

    std::vector<std::vector<double>> X, B, G;
    X.reserve(static_cast<std::size_t>(M));
    B.reserve(static_cast<std::size_t>(M));
    if (config.accumulate_af) G.reserve(static_cast<std::size_t>(M));

    auto snapshot = [&]() {
        X.push_back(st.x);
        B.push_back(st.B);
        if (config.accumulate_af) G.push_back(grad_field(model, J, st.x));
    };
    snapshot();

    for (int step = 0; step < steps; ++step) {
        if (st.K_N() > threshold) throw BlowupError(st.t);
        euler_maruyama_step(st, model, J, config.dt);
        if ((step + 1) % config.snapshot_stride == 0) snapshot();
    }
    if (st.K_N() > threshold) throw BlowupError(st.t);

    EmpiricalObservables obs;
    obs.N = N;
    obs.n_realizations = 1;
    obs.has_af = config.accumulate_af;
    obs.decoupled = (J.mode() == DisorderMode::Decoupled);
    obs.times.resize(static_cast<std::size_t>(M));
    const double delta = config.dt * config.snapshot_stride;
    for (int a = 0; a < M; ++a) obs.times[static_cast<std::size_t>(a)] = a * delta;

    obs.C = Matrix(M);
    obs.chi = Matrix(M);
    obs.var_C = Matrix(M);
    obs.var_chi = Matrix(M);
    obs.K.resize(static_cast<std::size_t>(M));
    for (int a = 0; a < M; ++a) {
        for (int b = 0; b <= a; ++b) {
            const double c = dot(X[static_cast<std::size_t>(a)], X[static_cast<std::size_t>(b)]) / N;
            obs.C(a, b) = c;
            obs.C(b, a) = c;
        }
        obs.K[static_cast<std::size_t>(a)] = obs.C(a, a);
        for (int b = 0; b < M; ++b)
            obs.chi(a, b) = dot(X[static_cast<std::size_t>(a)], B[static_cast<std::size_t>(b)]) / N;
    }
    if (config.accumulate_af) {
        obs.A = Matrix(M);
        obs.F = Matrix(M);
        for (int a = 0; a < M; ++a)
            for (int b = 0; b < M; ++b) {
                obs.A(a, b) = dot(G[static_cast<std::size_t>(a)], X[static_cast<std::size_t>(b)]) / N;
                obs.F(a, b) = dot(G[static_cast<std::size_t>(a)], B[static_cast<std::size_t>(b)]) / N;
            }
    }
    return obs;
}

EmpiricalObservables average_realizations(std::span<const EmpiricalObservables> runs) {
    if (runs.empty()) throw std::invalid_argument("average: no runs");
    const auto& first = runs[0];
    const int M = static_cast<int>(first.times.size());
    for (const auto& r : runs) {
        if (r.times != first.times || r.N != first.N || r.has_af != first.has_af ||
            r.decoupled != first.decoupled)
            throw std::invalid_argument("average: observable grids do not match");
    }

    EmpiricalObservables out;
    out.times = first.times;
    out.N = first.N;
    out.has_af = first.has_af;
    out.decoupled = first.decoupled;
    out.n_realizations = 0;
    for (const auto& r : runs) out.n_realizations += r.n_realizations;

    const int k = static_cast<int>(runs.size());
    out.C = Matrix(M);
    out.chi = Matrix(M);
    out.var_C = Matrix(M);
    out.var_chi = Matrix(M);
    out.K.assign(static_cast<std::size_t>(M), 0.0);
    if (out.has_af) { out.A = Matrix(M); out.F = Matrix(M); }

    for (const auto& r : runs) {
        for (std::size_t i = 0; i < out.C.a.size(); ++i) {
            out.C.a[i] += r.C.a[i] / k;
            out.chi.a[i] += r.chi.a[i] / k;
        }
        for (int a = 0; a < M; ++a) out.K[static_cast<std::size_t>(a)] += r.K[static_cast<std::size_t>(a)] / k;
        if (out.has_af)
            for (std::size_t i = 0; i < out.A.a.size(); ++i) {
                out.A.a[i] += r.A.a[i] / k;
                out.F.a[i] += r.F.a[i] / k;
            }
    }
    // variance of the mean: s^2/k from the spread across runs
    if (k > 1) {
        for (const auto& r : runs)
            for (std::size_t i = 0; i < out.C.a.size(); ++i) {
                const double dc = r.C.a[i] - out.C.a[i];
                const double dx = r.chi.a[i] - out.chi.a[i];
                out.var_C.a[i] += dc * dc / ((k - 1.0) * k);
                out.var_chi.a[i] += dx * dx / ((k - 1.0) * k);
            }
    }
    return out;
}

std::pair<Matrix, Matrix> derived_DE(const EmpiricalObservables& obs, const ModelSpec& model) {
    if (!obs.has_af) throw std::invalid_argument("derived_DE: observables lack A and F");
    const int M = static_cast<int>(obs.times.size());
    Matrix D(M), E(M);
    for (int s = 0; s < M; ++s)
        for (int t = 0; t < M; ++t) {
            D(s, t) = -model.confinement.f_prime(obs.K[static_cast<std::size_t>(t)]) * obs.C(s, t) +
                      obs.A(t, s);
            E(s, t) = -model.confinement.f_prime(obs.K[static_cast<std::size_t>(s)]) * obs.chi(s, t) +
                      obs.F(s, t);
        }
    return {std::move(D), std::move(E)};
}

} // namespace pspin
