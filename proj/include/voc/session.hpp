#pragma once

#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "voc/io.hpp"
#include "voc/merge_tree.hpp"
#include "voc/optimal_volume.hpp"
#include "voc/persistence.hpp"

namespace voc {

enum class Engine { automatic, reduction, merge_tree };

/// How a volume or cycle query names its pair.
struct PairQuery {
    std::optional<Index> death_index;
    std::optional<Index> birth_index;  // only for essential classes
};

/// One loaded filtration with lazily computed, shared analysis results.
/// All public members are safe to call from several threads.
class Session {
public:
    explicit Session(Filtration f) : f_(std::move(f)) {}
    Session(const Session&) = delete;
    Session& operator=(const Session&) = delete;

    const Filtration& filtration() const { return f_; }

    const Z2Reduction& reduction() {
        std::call_once(z2_once_, [&] { z2_ = reduce<Z2>(f_, false); });
        return z2_;
    }

    const RealReduction& real_reduction() {
        std::call_once(real_once_, [&] { real_ = reduce<double>(f_, true); });
        return real_;
    }

    /// The dual-graph forest, or nullptr (with the reason) when the complex
    /// does not meet its preconditions.
    const PersistenceForest* forest(std::string* why = nullptr) {
        std::call_once(forest_once_, [&] {
            try {
                forest_ = compute_forest(f_);
            } catch (const ConditionViolation& e) {
                forest_error_ = e.what();
            }
        });
        if (forest_) return &*forest_;
        if (why) *why = forest_error_;
        return nullptr;
    }

    std::vector<PersistencePair> diagram(int degree, Engine engine = Engine::automatic, DiagramOptions opt = {}) {
        const int top = f_.max_dim();
        const bool codim_one = top >= 1 && degree == top - 1;
        if (engine == Engine::merge_tree) {
            std::string why;
            if (!codim_one) throw ConditionViolation("the merge-tree engine only computes degree " + std::to_string(top - 1));
            if (!forest(&why)) throw ConditionViolation(why);
            return diagram_from_forest(*forest(), f_, opt);
        }
        if (engine == Engine::automatic && codim_one && forest()) return diagram_from_forest(*forest(), f_, opt);
        return voc::diagram(f_, reduction(), degree, opt);
    }

    /// Resolves a query to a pair of the filtration.
    PersistencePair find_pair(const PairQuery& q) {
        const auto& m = reduction();
        if (q.death_index) {
            const Index d = *q.death_index;
            if (d < 1 || d > f_.size() || m.low(d) == kNoIndex)
                throw LookupError("no pair dies at index " + std::to_string(d));
            const Index b = m.low(d);
            return {f_.dim(b), b, d, f_.value(b), f_.value(d)};
        }
        if (q.birth_index) {
            const Index b = *q.birth_index;
            if (b >= 1 && b <= f_.size() && m.r[b].empty() && m.pivot_column[b] == kNoIndex)
                return {f_.dim(b), b, std::nullopt, f_.value(b), std::numeric_limits<double>::infinity()};
            throw LookupError("no essential class is born at index " + std::to_string(b));
        }
        throw LookupError("a pair needs a death index or, for an essential class, a birth index");
    }

    OptimalVolume volume(const PersistencePair& p, const VolumeOptions& opt = {}) {
        if (p.essential()) throw UnsupportedPair(p);
        return optimal_volume(f_, p, diagram(p.degree, Engine::reduction), opt);
    }

    // Serialized results, memoized; identical requests give identical bytes.

    std::string diagram_json(int degree) {
        return cached({"diagram", degree, 0.0}, [&] { return io::diagram_json(degree, diagram(degree)).dump(); });
    }

    std::string volume_json(const PairQuery& q, std::optional<double> radius = std::nullopt) {
        const auto p = find_pair(q);
        if (p.essential()) throw UnsupportedPair(p);
        const double key_r = radius.value_or(-1.0);
        return cached({"volume", *p.death_index, key_r}, [&] {
            VolumeOptions opt;
            opt.radius = radius;
            return io::volume_json(f_, volume(p, opt)).dump();
        });
    }

    std::string cycle_json(const PairQuery& q) {
        const auto p = find_pair(q);
        return cached({p.essential() ? "cycle-essential" : "cycle", p.death_index.value_or(p.birth_index), 0.0},
                      [&] { return io::cycle_json(f_, p, optimal_cycle(f_, real_reduction(), p)).dump(); });
    }

    std::string tree_json() {
        return cached({"tree", 0, 0.0}, [&] {
            std::string why;
            const auto* fo = forest(&why);
            if (!fo) throw ConditionViolation(why);
            return io::tree_json(*fo, persistence_tree(*fo, f_)).dump();
        });
    }

    std::string points_json() const {
        io::json pts = io::json::array();
        for (const auto& [id, p] : f_.points()) {
            io::json j{{"id", id}, {"x", p.x}};
            if (p.weight) j["weight"] = *p.weight;
            pts.push_back(std::move(j));
        }
        return io::json{{"dim", f_.ambient_dim()}, {"points", std::move(pts)}}.dump();
    }

    std::string meta_json() {
        std::string why;
        const bool codim_one = forest(&why) != nullptr;
        io::json j{{"size", f_.size()},
                   {"ambient_dim", f_.ambient_dim()},
                   {"max_dim", f_.max_dim()},
                   {"counts_by_dim", f_.counts_by_dim()},
                   {"has_coordinates", f_.has_coordinates()},
                   {"weighted", f_.has_weights()},
                   {"merge_tree", codim_one}};
        if (!codim_one) j["merge_tree_reason"] = why;
        return j.dump();
    }

    /// Number of distinct results computed so far.
    std::size_t cache_size() const {
        std::lock_guard lock(mu_);
        return cache_.size();
    }

private:
    using Key = std::tuple<std::string, Index, double>;

    /// The first caller for a key computes; concurrent callers wait on the
    /// same future. Failures are cached like results, since they are
    /// deterministic too.
    std::string cached(const Key& key, const std::function<std::string()>& compute) {
        std::promise<std::string> promise;
        std::shared_future<std::string> fut;
        bool owner = false;
        {
            std::lock_guard lock(mu_);
            auto it = cache_.find(key);
            if (it == cache_.end()) {
                fut = promise.get_future().share();
                cache_.emplace(key, fut);
                owner = true;
            } else {
                fut = it->second;
            }
        }
        if (owner) {
            try {
                promise.set_value(compute());
            } catch (...) {
                promise.set_exception(std::current_exception());
            }
        }
        return fut.get();
    }

    Filtration f_;
    std::once_flag z2_once_, real_once_, forest_once_;
    Z2Reduction z2_;
    RealReduction real_;
    std::optional<PersistenceForest> forest_;
    std::string forest_error_;
    mutable std::mutex mu_;
    std::map<Key, std::shared_future<std::string>> cache_;
};

}  // namespace voc
