#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "gup/engine.hpp"
#include "gup/error.hpp"
#include "gup/image.hpp"
#include "gup/metrics.hpp"
#include "gup/model.hpp"
#include "gup/resample.hpp"

namespace gup {

enum class Method { bicubic, guided };

inline std::string to_string(Method m) {
    return m == Method::bicubic ? "bicubic" : "guided";
}

// One evaluation instance: a low-res source, its full-res guide, and the
// ground truth the reconstruction is scored against.
struct EvalScene {
    std::string name;
    Image lowres;
    Image guide;
    Image truth;
};

inline MetricReport evaluate_pair(const Image& lowres, const Image& guide, const Image& truth,
                                  Method method, const ModelParams& model = {},
                                  DistanceOrder order = {}) {
    require(truth.height == guide.height && truth.width == guide.width,
            Errc::dimension_mismatch, "truth and guide must share dimensions");
    Image recon;
    if (method == Method::bicubic) {
        recon = bicubic_upsample(lowres, truth.height, truth.width);
    } else {
        recon = upsample_guided(lowres, guide, model, order).image;
    }
    return {psnr(recon, truth), ssim(recon, truth)};
}

struct ReportRow {
    std::string scene;
    std::string method;
    double psnr_db = 0.0;
    double ssim = 0.0;
};

inline void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
    out << "scene,method,psnr_db,ssim\n";
    char buf[128];
    for (const ReportRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f", r.psnr_db, r.ssim);
        out << r.scene << "," << r.method << "," << buf << "\n";
    }
}

struct SweepRow {
    double order = 0.0;
    double mean_psnr_db = 0.0;
    double mean_ssim = 0.0;
};

// Distance-order comparison on a fixed scene set; one model per order
// (trained or default).
inline std::vector<SweepRow> sweep_orders(
    const std::vector<EvalScene>& scenes, const std::vector<double>& orders,
    const std::function<ModelParams(double)>& model_for_order) {
    require(!scenes.empty(), Errc::invalid_argument, "sweep needs at least one scene");
    std::vector<SweepRow> table;
    table.reserve(orders.size());
    for (double o : orders) {
        const ModelParams model = model_for_order ? model_for_order(o) : ModelParams{};
        SweepRow row;
        row.order = o;
        for (const EvalScene& s : scenes) {
            const MetricReport m =
                evaluate_pair(s.lowres, s.guide, s.truth, Method::guided, model, DistanceOrder(o));
            row.mean_psnr_db += m.psnr_db;
            row.mean_ssim += m.ssim;
        }
        row.mean_psnr_db /= static_cast<double>(scenes.size());
        row.mean_ssim /= static_cast<double>(scenes.size());
        table.push_back(row);
    }
    return table;
}

} // namespace gup
