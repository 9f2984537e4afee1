#pragma once

// Measurement programs: straight-line lists of preparations, Pauli product
// measurements and (conditional) rotations. Board protocols record their
// logical action in this form so it can be replayed on a LogicalState.

#include <functional>
#include <variant>

#include "patchwork/logical_sim.hpp"

namespace patchwork {

/// Product of the outcomes in `slots` must equal `value`.
struct Literal {
    std::vector<size_t> slots;
    int value = 1;
};

/// Disjunction of conjunctions of literals. An empty condition is "always".
struct Condition {
    std::vector<std::vector<Literal>> any_of;

    static Condition always() { return {}; }
    static Condition outcome(size_t slot, int value) { return {{{Literal{{slot}, value}}}}; }
    static Condition parity(std::vector<size_t> slots, int value) { return {{{Literal{std::move(slots), value}}}}; }

    bool is_always() const { return any_of.empty(); }

    Condition operator&&(const Condition &o) const {
        if (is_always()) return o;
        if (o.is_always()) return *this;
        Condition r;
        for (auto &a : any_of)
            for (auto &b : o.any_of) {
                auto t = a;
                t.insert(t.end(), b.begin(), b.end());
                r.any_of.push_back(t);
            }
        return r;
    }
    Condition operator||(const Condition &o) const {
        if (is_always() || o.is_always()) return always();
        Condition r = *this;
        r.any_of.insert(r.any_of.end(), o.any_of.begin(), o.any_of.end());
        return r;
    }

    size_t max_slot_plus_one() const {
        size_t m = 0;
        for (auto &t : any_of)
            for (auto &l : t)
                for (auto s : l.slots) m = std::max(m, s + 1);
        return m;
    }

    bool eval(const std::vector<int> &outcomes) const {
        if (is_always()) return true;
        for (auto &term : any_of) {
            bool ok = true;
            for (auto &lit : term) {
                int prod = 1;
                for (auto s : lit.slots) prod *= outcomes.at(s);
                if (prod != lit.value) {
                    ok = false;
                    break;
                }
            }
            if (ok) return true;
        }
        return false;
    }
};

namespace step {

struct Prepare {
    size_t qubit;
    Prep state;
};

/// Measures `basis`, or `alt` when `use_alt` holds. Each measurement appends
/// one outcome slot.
struct Measure {
    PauliMeasurement basis;
    std::optional<PauliMeasurement> alt;
    Condition use_alt;
    std::string tag;
};

struct Rotate {
    PauliRotation rotation;
    Condition when;
    std::string tag;
};

struct Release {
    size_t qubit;
};

}  // namespace step

using Step = std::variant<step::Prepare, step::Measure, step::Rotate, step::Release>;

struct Program {
    size_t num_qubits = 0;
    std::vector<Step> steps;

    explicit Program(size_t n = 0) : num_qubits(n) {}

    size_t num_measurements() const {
        size_t m = 0;
        for (auto &s : steps) m += std::holds_alternative<step::Measure>(s);
        return m;
    }

    void prepare(size_t q, Prep p) { steps.push_back(step::Prepare{q, p}); }
    /// Returns the outcome slot.
    size_t measure(PauliMeasurement m, std::string tag = "") {
        steps.push_back(step::Measure{std::move(m), std::nullopt, {}, std::move(tag)});
        return num_measurements() - 1;
    }
    size_t measure_either(PauliMeasurement normal, PauliMeasurement alt, Condition use_alt, std::string tag = "") {
        steps.push_back(step::Measure{std::move(normal), std::move(alt), std::move(use_alt), std::move(tag)});
        return num_measurements() - 1;
    }
    void rotate(PauliRotation r, Condition when = {}, std::string tag = "") {
        steps.push_back(step::Rotate{std::move(r), std::move(when), std::move(tag)});
    }
    void release(size_t q) { steps.push_back(step::Release{q}); }

    void append(const Program &o) {
        if (o.num_qubits != num_qubits) throw DimensionError("append: programs act on different registers");
        size_t offset = num_measurements();
        for (auto s : o.steps) {
            auto shift = [&](Condition &c) {
                for (auto &t : c.any_of)
                    for (auto &l : t)
                        for (auto &x : l.slots) x += offset;
            };
            if (auto *m = std::get_if<step::Measure>(&s)) shift(m->use_alt);
            if (auto *r = std::get_if<step::Rotate>(&s)) shift(r->when);
            steps.push_back(std::move(s));
        }
    }

    /// Throws if any condition refers to an outcome that does not exist yet.
    void check() const {
        size_t seen = 0;
        for (size_t i = 0; i < steps.size(); i++) {
            const Condition *c = nullptr;
            if (auto *m = std::get_if<step::Measure>(&steps[i])) c = &m->use_alt;
            if (auto *r = std::get_if<step::Rotate>(&steps[i])) c = &r->when;
            if (c && c->max_slot_plus_one() > seen)
                throw InvariantError("program step " + std::to_string(i) + " refers to an outcome not yet measured");
            if (std::holds_alternative<step::Measure>(steps[i])) seen++;
        }
    }
};

struct Transcript {
    std::vector<int> outcomes;
    std::vector<std::string> bases;  // the basis actually measured per slot
    LogicalState state;
    double probability = 1.0;  // probability of this outcome branch
};

namespace detail {

inline void exec(const Step &s, LogicalState &st, std::vector<int> &out, std::vector<std::string> &bases,
                 double &prob, std::optional<int> forced, Philox4x32 *rng) {
    if (auto *p = std::get_if<step::Prepare>(&s)) {
        st.prepare(p->qubit, p->state);
    } else if (auto *m = std::get_if<step::Measure>(&s)) {
        const PauliMeasurement &b = (m->alt && m->use_alt.eval(out)) ? *m->alt : m->basis;
        double pr = 1;
        out.push_back(st.measure(b, forced, rng, &pr));
        bases.push_back(b.str());
        prob *= pr;
    } else if (auto *r = std::get_if<step::Rotate>(&s)) {
        if (r->when.eval(out)) st.apply_rotation(r->rotation);
    } else if (auto *rl = std::get_if<step::Release>(&s)) {
        st.release(rl->qubit);
    }
}

inline void branches(const Program &prog, size_t i, LogicalState st, std::vector<int> out,
                     std::vector<std::string> bases, double prob, double min_prob,
                     const std::function<void(const Transcript &)> &fn) {
    for (; i < prog.steps.size(); i++) {
        if (std::holds_alternative<step::Measure>(prog.steps[i])) {
            for (int o : {1, -1}) {
                auto &m = std::get<step::Measure>(prog.steps[i]);
                const PauliMeasurement &b = (m.alt && m.use_alt.eval(out)) ? *m.alt : m.basis;
                if (st.probability(b, o) < min_prob) continue;
                LogicalState s2 = st;
                auto o2 = out;
                auto b2 = bases;
                double p2 = prob;
                exec(prog.steps[i], s2, o2, b2, p2, o, nullptr);
                branches(prog, i + 1, std::move(s2), std::move(o2), std::move(b2), p2, min_prob, fn);
            }
            return;
        }
        exec(prog.steps[i], st, out, bases, prob, std::nullopt, nullptr);
    }
    fn(Transcript{out, bases, st, prob});
}

}  // namespace detail

/// Run a program. With `forced`, slot j takes outcome forced[j]; otherwise
/// outcomes are sampled from `rng`.
inline Transcript run_measurement_program(LogicalState state, const Program &prog, Philox4x32 *rng = nullptr,
                                          const std::vector<int> *forced = nullptr) {
    if (prog.num_qubits != state.num_qubits()) throw DimensionError("program and state sizes differ");
    prog.check();
    std::vector<int> out;
    std::vector<std::string> bases;
    double prob = 1;
    for (auto &s : prog.steps) {
        std::optional<int> f;
        if (forced && std::holds_alternative<step::Measure>(s)) {
            if (out.size() >= forced->size()) throw InvariantError("run_measurement_program: too few forced outcomes");
            f = (*forced)[out.size()];
        }
        detail::exec(s, state, out, bases, prob, f, rng);
    }
    return Transcript{out, bases, std::move(state), prob};
}

/// Visit every outcome branch with probability above `min_prob`.
inline void for_each_branch(const LogicalState &state, const Program &prog,
                            const std::function<void(const Transcript &)> &fn, double min_prob = 1e-12) {
    if (prog.num_qubits != state.num_qubits()) throw DimensionError("program and state sizes differ");
    prog.check();
    detail::branches(prog, 0, state, {}, {}, 1.0, min_prob, fn);
}

}  // namespace patchwork
