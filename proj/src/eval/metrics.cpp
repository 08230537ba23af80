#include "affect/eval/metrics.hpp"

#include "affect/common/errors.hpp"

namespace affect::eval {

long ConfusionMatrix::row_total(Label truth) const {
    const auto& r = counts[index_of(truth)];
    return r[0] + r[1] + r[2];
}

long ConfusionMatrix::total() const {
    long t = 0;
    for (Label l : kAllLabels) t += row_total(l);
    return t;
}

std::optional<double> ConfusionMatrix::recall(Label truth) const {
    const long n = row_total(truth);
    if (n == 0) return std::nullopt;
    return static_cast<double>(at(truth, truth)) / static_cast<double>(n);
}

double ConfusionMatrix::accuracy() const {
    const long n = total();
    if (n == 0) return 0.0;
    long diag = 0;
    for (Label l : kAllLabels) diag += at(l, l);
    return static_cast<double>(diag) / static_cast<double>(n);
}

std::string ConfusionMatrix::to_csv() const {
    std::string out = "truth,pred_L,pred_M,pred_H\n";
    for (Label t : kAllLabels) {
        out += to_char(t);
        for (Label p : kAllLabels) out += ',' + std::to_string(at(t, p));
        out += '\n';
    }
    return out;
}

ConfusionMatrix confusion(std::span<const Label> truth, std::span<const Label> pred) {
    if (truth.size() != pred.size())
        throw DataError("confusion: truth has " + std::to_string(truth.size()) + " labels, predictions " +
                        std::to_string(pred.size()));
    if (truth.empty()) throw DataError("confusion: empty label vectors");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < truth.size(); ++i) ++cm.at(truth[i], pred[i]);
    return cm;
}

double uar(const ConfusionMatrix& cm) {
    double sum = 0.0;
    int present = 0;
    for (Label l : kAllLabels) {
        if (auto r = cm.recall(l)) {
            sum += *r;
            ++present;
        }
    }
    return present == 0 ? 0.0 : sum / present;
}

double uar(std::span<const Label> truth, std::span<const Label> pred) { return uar(confusion(truth, pred)); }

} // namespace affect::eval
