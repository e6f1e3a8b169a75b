#ifndef NSPLAN_NLM_LEARNED_HPP
#define NSPLAN_NLM_LEARNED_HPP

#include <memory>

#include "nsplan/heur/heuristics.hpp"
#include "nsplan/nlm/model.hpp"

namespace nsplan {

// Test-time heuristic -V(s,G) = -Vhat(s,G) + h_gamma(s). A model trained
// without shaping contributes -Vhat alone.
class LearnedEvaluator final : public Evaluator {
public:
    LearnedEvaluator(const NlmModel<float>& model, const GroundTask& task)
        : model_(model), task_(task) {
        if (model.fingerprint != task.signature_fingerprint())
            throw TaskError("model/task predicate signature mismatch: model " +
                            fingerprint_hex(model.fingerprint) + " vs task " +
                            fingerprint_hex(task.signature_fingerprint()));
        if (model.shaping != "none") base_ = make_heuristic(task, model.shaping);
    }

    double value(const State& s) override {
        Mapr<float> m = encode<float>(s, task_.goal, task_);
        double v = static_cast<double>(nlm_value(model_, m));
        if (!base_) return -v;
        return -v + discounted(base_->value(s), model_.gamma);
    }

    const std::string& id() const override {
        static const std::string n = "learned";
        return n;
    }
    void reset_cache() override {
        if (base_) base_->reset_cache();
    }

    static std::string fingerprint_hex(uint64_t fp) {
        static const char* hex = "0123456789abcdef";
        std::string s(16, '0');
        for (int i = 15; i >= 0; --i) {
            s[i] = hex[fp & 0xf];
            fp >>= 4;
        }
        return s;
    }

private:
    const NlmModel<float>& model_;
    const GroundTask& task_;
    std::unique_ptr<Evaluator> base_;
};

}  // namespace nsplan

#endif
