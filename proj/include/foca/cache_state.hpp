#pragma once

#include <deque>
#include <optional>

#include "foca/feature.hpp"

namespace foca {

struct CacheEntry {
    int step = 0;
    FeatureVector value;
};

/// Ring of recent feature values consumed by the predictors.
///
/// `recent` holds the two most recent features (full or predicted) at
/// consecutive-ish steps; `taylor_history` holds only full computes; the
/// anchor is the newest full compute together with the slope formed from the
/// last two full computes over their actual spacing.
class CacheState {
  public:
    explicit CacheState(double h = 1.0, int taylor_capacity = 3) : h_(h), taylor_capacity_(taylor_capacity) {}

    double h() const { return h_; }
    int taylor_capacity() const { return taylor_capacity_; }

    /// Record a fully computed feature. Updates recent, the anchor and the
    /// anchor slope, and the full-compute history.
    void observe_full(int step, const FeatureVector& value) {
        if (last_full_) {
            const int gap = step - last_full_->step;
            if (gap > 0)
                anchor_slope_ = (1.0 / (gap * h_)) * (value - last_full_->value);
        }
        last_full_ = CacheEntry{step, value};
        push_recent(step, value);
        taylor_history_.push_back(CacheEntry{step, value});
        while (static_cast<int>(taylor_history_.size()) > taylor_capacity_)
            taylor_history_.pop_front();
    }

    /// Record a predicted feature (enters `recent` only).
    void observe_predicted(int step, const FeatureVector& value) { push_recent(step, value); }

    /// Replace the newest recent entry in place (corrector rewrites the prediction).
    void replace_newest(const FeatureVector& value) {
        if (recent_.empty())
            throw HistoryError("CacheState::replace_newest: empty cache");
        recent_.back().value = value;
    }

    bool has_last_full() const { return last_full_.has_value(); }
    const CacheEntry& last_full() const {
        if (!last_full_)
            throw HistoryError("CacheState: no full compute recorded yet");
        return *last_full_;
    }

    bool has_anchor_slope() const { return anchor_slope_.has_value(); }
    const FeatureVector& anchor_slope() const {
        if (!anchor_slope_)
            throw HistoryError("CacheState: anchor slope needs two full computes");
        return *anchor_slope_;
    }

    const std::deque<CacheEntry>& recent() const { return recent_; }
    const std::deque<CacheEntry>& taylor_history() const { return taylor_history_; }

    void clear() {
        recent_.clear();
        taylor_history_.clear();
        last_full_.reset();
        anchor_slope_.reset();
    }

  private:
    void push_recent(int step, const FeatureVector& value) {
        recent_.push_back(CacheEntry{step, value});
        while (recent_.size() > 2)
            recent_.pop_front();
    }

    double h_;
    int taylor_capacity_;
    std::deque<CacheEntry> recent_;
    std::deque<CacheEntry> taylor_history_;
    std::optional<CacheEntry> last_full_;
    std::optional<FeatureVector> anchor_slope_;
};

}  // namespace foca
