// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 pathloss-kit contributors

#ifndef PATHLOSS_PROPAGATION_HPP
#define PATHLOSS_PROPAGATION_HPP

#include <cmath>
#include <string>

#include "pathloss/common.hpp"
#include "pathloss/terrain.hpp"

namespace pathloss {

/// Antenna-to-antenna link description fed to the propagation models.
struct LinkGeometry {
    double tx_antenna_asl = 0.0;  // tx ground + tower height, meters
    double rx_antenna_asl = 0.0;  // rx ground + rx antenna height, meters
    double distance_2d = 0.0;     // horizontal separation, meters
    double freq_mhz = 0.0;

    double distance_3d() const {
        return std::hypot(distance_2d, rx_antenna_asl - tx_antenna_asl);
    }
};

// ---------------------------------------------------------------------------
// Free-space pathloss
// ---------------------------------------------------------------------------

/// Friis free-space loss, 20 log10(4 pi d f / c).
inline double fspl(double distance_m, double freq_mhz) {
    require(distance_m > 0.0, "fspl: distance must be positive");
    require(freq_mhz > 0.0, "fspl: frequency must be positive");
    const double freq_hz = freq_mhz * 1e6;
    return 20.0 * std::log10(4.0 * M_PI * distance_m * freq_hz / speed_of_light_mps);
}

// ---------------------------------------------------------------------------
// COST-231 Hata
// ---------------------------------------------------------------------------

enum class Cost231Env { suburban, metropolitan };

/// Recommended domain: f in [1500, 2000] MHz, h_base in [30, 200] m,
/// h_mobile in [1, 10] m, d in [0.02, 20] km. Out-of-domain inputs are
/// evaluated anyway and flagged through `domain_warning`; the model is
/// routinely applied outside its band (e.g. LTE band 12 at 731.5 MHz).
inline double cost231_hata(double distance_km, double freq_mhz, double h_base_m,
                           double h_mobile_m, Cost231Env env, bool* domain_warning = nullptr) {
    require(distance_km > 0.0, "cost231_hata: distance must be positive");
    require(freq_mhz > 0.0, "cost231_hata: frequency must be positive");
    require(h_base_m > 0.0 && h_mobile_m > 0.0, "cost231_hata: heights must be positive");
    if (domain_warning)
        *domain_warning = freq_mhz < 1500.0 || freq_mhz > 2000.0 || h_base_m < 30.0 ||
                          h_base_m > 200.0 || h_mobile_m < 1.0 || h_mobile_m > 10.0 ||
                          distance_km < 0.02 || distance_km > 20.0;

    const double log_f = std::log10(freq_mhz);
    const double log_hb = std::log10(h_base_m);
    const double a_hm = (1.1 * log_f - 0.7) * h_mobile_m - (1.56 * log_f - 0.8);
    const double c_env = (env == Cost231Env::metropolitan) ? 3.0 : 0.0;
    return 46.3 + 33.9 * log_f - 13.82 * log_hb - a_hm +
           (44.9 - 6.55 * log_hb) * std::log10(distance_km) + c_env;
}

// ---------------------------------------------------------------------------
// SUI (Stanford University Interim)
// ---------------------------------------------------------------------------

enum class SuiTerrain { A, B, C };

inline constexpr double sui_reference_distance_m = 100.0;

/// Deterministic SUI loss (shadowing term 0). Terrain A is the hilly/dense
/// worst case, C the flat rural best case. Undefined below the 100 m
/// reference distance. Recommended h_base in [10, 80] m, h_rx in [2, 10] m;
/// out-of-domain heights are flagged, not rejected.
inline double sui(double distance_m, double freq_mhz, double h_base_m, double h_rx_m,
                  SuiTerrain terrain, bool* domain_warning = nullptr) {
    require(freq_mhz > 0.0, "sui: frequency must be positive");
    require(h_base_m > 0.0 && h_rx_m > 0.0, "sui: heights must be positive");
    require(distance_m >= sui_reference_distance_m,
            "sui: distance " + format_double(distance_m) +
                " m is below the model's 100 m reference distance");
    if (domain_warning)
        *domain_warning = h_base_m < 10.0 || h_base_m > 80.0 || h_rx_m < 2.0 || h_rx_m > 10.0;

    double a = 0.0, b = 0.0, c = 0.0;
    switch (terrain) {
        case SuiTerrain::A: a = 4.6; b = 0.0075; c = 12.6; break;
        case SuiTerrain::B: a = 4.0; b = 0.0065; c = 17.1; break;
        case SuiTerrain::C: a = 3.6; b = 0.005; c = 20.0; break;
    }
    const double lambda = speed_of_light_mps / (freq_mhz * 1e6);
    const double intercept =
        20.0 * std::log10(4.0 * M_PI * sui_reference_distance_m / lambda);
    const double gamma = a - b * h_base_m + c / h_base_m;
    const double xf = 6.0 * std::log10(freq_mhz / 2000.0);
    const double xh = (terrain == SuiTerrain::C ? -20.0 : -10.8) * std::log10(h_rx_m / 2.0);
    return intercept + 10.0 * gamma * std::log10(distance_m / sui_reference_distance_m) + xf + xh;
}

// ---------------------------------------------------------------------------
// First Fresnel zone
// ---------------------------------------------------------------------------

/// Radius of the first Fresnel zone at a point splitting the path into d1/d2.
inline double fresnel_radius(double d1_m, double d2_m, double freq_mhz) {
    require(d1_m > 0.0 && d2_m > 0.0, "fresnel_radius: segment lengths must be positive");
    require(freq_mhz > 0.0, "fresnel_radius: frequency must be positive");
    const double lambda = speed_of_light_mps / (freq_mhz * 1e6);
    return std::sqrt(lambda * (d1_m * d2_m) / (d1_m + d2_m));
}

/// Cumulative blockage distance along the tx -> rx path: a profile sample is
/// blocked when the surface rises above the direct antenna-to-antenna line
/// minus 60% of the local first-Fresnel radius. Endpoint samples are
/// excluded so the mast and receiver never count as obstructions. Works on a
/// precomputed profile; the overload below extracts one.
inline double blockage_distance(const std::vector<ProfileSample>& profile, double tx_antenna_asl,
                                double rx_antenna_asl, double freq_mhz, double step_m) {
    require(profile.size() >= 2, "blockage: profile needs at least two samples");
    const double total = profile.back().distance;
    int blocked = 0;
    for (std::size_t i = 1; i + 1 < profile.size(); ++i) {
        const double d = profile[i].distance;
        const double line =
            tx_antenna_asl + (rx_antenna_asl - tx_antenna_asl) * (d / total);
        const double clearance = 0.6 * fresnel_radius(d, total - d, freq_mhz);
        if (profile[i].surface > line - clearance) ++blocked;
    }
    return std::min(blocked * step_m, total);
}

inline double blockage_distance(const TerrainStack& stack, const TxSite& tx, Point rx,
                                double rx_antenna_m, double freq_mhz, double step_m) {
    require(step_m > 0.0, "blockage: step must be positive");
    const auto profile = extract_profile(stack, tx.position(), rx, step_m);
    const double tx_asl =
        sample(stack.ground, tx.x, tx.y, SampleMode::bilinear) + tx.tower_height;
    const double rx_asl = sample(stack.ground, rx.x, rx.y, SampleMode::bilinear) + rx_antenna_m;
    return blockage_distance(profile, tx_asl, rx_asl, freq_mhz, step_m);
}

// ---------------------------------------------------------------------------
// Model dispatch
// ---------------------------------------------------------------------------

enum class ModelKind { fspl, cost231, sui };

struct ModelParams {
    ModelKind kind = ModelKind::fspl;
    Cost231Env env = Cost231Env::suburban;    // cost231 only
    SuiTerrain terrain = SuiTerrain::C;       // sui only
};

inline ModelKind parse_model_kind(const std::string& name) {
    if (name == "fspl") return ModelKind::fspl;
    if (name == "cost231") return ModelKind::cost231;
    if (name == "sui") return ModelKind::sui;
    throw Error("unknown propagation model '" + name +
                "'; built-ins are fspl, cost231, sui (other models, e.g. eHata, plug in "
                "through the model_pathloss dispatch seam)");
}

inline std::string model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::fspl: return "fspl";
        case ModelKind::cost231: return "cost231";
        case ModelKind::sui: return "sui";
    }
    return "?";
}

/// Maps the common "rural" request onto the standard's suburban correction;
/// COST-231 defines only suburban (0 dB) and metropolitan (3 dB).
inline Cost231Env parse_cost231_env(const std::string& name, bool* rural_mapped = nullptr) {
    if (rural_mapped) *rural_mapped = false;
    if (name == "suburban") return Cost231Env::suburban;
    if (name == "metropolitan" || name == "urban") return Cost231Env::metropolitan;
    if (name == "rural") {
        if (rural_mapped) *rural_mapped = true;
        return Cost231Env::suburban;
    }
    throw Error("unknown cost231 environment '" + name + "' (suburban, metropolitan, rural)");
}

inline SuiTerrain parse_sui_terrain(const std::string& name) {
    if (name == "A" || name == "a") return SuiTerrain::A;
    if (name == "B" || name == "b") return SuiTerrain::B;
    if (name == "C" || name == "c") return SuiTerrain::C;
    throw Error("unknown sui terrain '" + name + "' (A, B, C)");
}

/// Uniform dispatch over the built-in models. FSPL uses the 3-D
/// antenna-to-antenna distance; the empirical models take the horizontal
/// distance and antenna heights above ground.
inline double model_pathloss(const ModelParams& params, const LinkGeometry& geom,
                             double h_base_m, double h_rx_m, bool* domain_warning = nullptr) {
    switch (params.kind) {
        case ModelKind::fspl:
            if (domain_warning) *domain_warning = false;
            return fspl(geom.distance_3d(), geom.freq_mhz);
        case ModelKind::cost231:
            return cost231_hata(geom.distance_2d / 1000.0, geom.freq_mhz, h_base_m, h_rx_m,
                                params.env, domain_warning);
        case ModelKind::sui:
            return sui(geom.distance_2d, geom.freq_mhz, h_base_m, h_rx_m, params.terrain,
                       domain_warning);
    }
    throw Error("model_pathloss: invalid model kind");
}

}  // namespace pathloss

#endif  // PATHLOSS_PROPAGATION_HPP
