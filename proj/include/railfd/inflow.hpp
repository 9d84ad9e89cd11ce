#pragma once

#include <stdexcept>
#include <vector>

namespace railfd {

// Piecewise-constant train arrival rate a(t). The first segment also covers
// all times before its start; segment starts must be strictly increasing and
// rates strictly positive.
class InflowProfile {
  public:
    struct Segment {
        double start; // h
        double rate;  // tr/h
    };

    explicit InflowProfile(std::vector<Segment> segments)
        : segments_(std::move(segments)) {
        if (segments_.empty())
            throw std::invalid_argument("inflow profile needs at least one segment");
        for (std::size_t i = 0; i < segments_.size(); ++i) {
            if (!(segments_[i].rate > 0))
                throw std::invalid_argument("inflow rates must be positive");
            if (i > 0 && !(segments_[i].start > segments_[i - 1].start))
                throw std::invalid_argument("inflow segment times must be strictly increasing");
        }
    }

    static InflowProfile constant(double rate) { return InflowProfile({{0.0, rate}}); }

    double rate_at(double t) const {
        double r = segments_.front().rate;
        for (const auto& s : segments_) {
            if (s.start <= t) r = s.rate;
            else break;
        }
        return r;
    }

    bool is_constant() const { return segments_.size() == 1; }

    const std::vector<Segment>& segments() const { return segments_; }

  private:
    std::vector<Segment> segments_;
};

} // namespace railfd
