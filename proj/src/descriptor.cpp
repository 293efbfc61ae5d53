#include "ilscape/descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "ilscape/error.hpp"

namespace ilscape {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

void check_bins(int num_bins) {
    if (num_bins < 2)
        fail_input("need at least 2 histogram bins, got " + std::to_string(num_bins));
}

void check_scale(double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale))
        fail_input("attribute scale must be positive and finite, got " + num(scale));
}

} // namespace

LocalHistogram local_histogram(const AttributeGrids& grids, int attribute,
                               const VectorField& field, const Sensor& sensor,
                               const SurfaceCache& cache, int num_bins,
                               double scale) {
    if (attribute < 0 || attribute >= kAttributeCount)
        fail_input("attribute index " + std::to_string(attribute) + " out of range");
    check_bins(num_bins);
    check_scale(scale);
    if (grids.resolution != field.resolution)
        fail_internal("attribute grid resolution " + std::to_string(grids.resolution) +
                      " does not match field resolution " +
                      std::to_string(field.resolution));
    const int n = field.resolution;
    const size_t cells = static_cast<size_t>(n) * n * n;
    if (cache.have.size() != cells)
        fail_internal("surface cache holds " + std::to_string(cache.have.size()) +
                      " cells, field has " + std::to_string(cells));

    LocalHistogram h;
    h.attribute = attribute;
    h.sensor_id = sensor.id;
    h.sensor_size = sensor.size;
    h.bins.assign(num_bins, 0.0);
    h.raw_bins.assign(num_bins, 0.0);

    const std::vector<double>& values = grids.values[attribute];
    const double r = sensor.size;
    double total = 0.0;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const size_t c = field.index(i, j, k);
                if (field.count[c] == 0) continue;
                ++h.occupied_cells;
                if (!cache.have[c])
                    fail_internal("occupied cell " + std::to_string(c) +
                                  " has no cached surface point");
                const double t = std::clamp(values[c] / scale, 0.0, 1.0);
                // t = 0 lands in bin 0 but adds no mass.
                const int bin = std::min(static_cast<int>(t * num_bins), num_bins - 1);
                const double dist = (field.cell_center(i, j, k) - cache.point[c]).norm();
                const double contribution = t * std::exp(-sqr(dist / r)) / num_bins;
                h.raw_bins[bin] += contribution;
                total += contribution;
            }
    if (total > 0.0) {
        h.active = true;
        for (int b = 0; b < num_bins; ++b) h.bins[b] = h.raw_bins[b] / total;
    }
    return h;
}

std::vector<double> volume_weighted_bins(
    const std::vector<LocalHistogram>& locals) {
    if (locals.empty()) fail_input("no active local histograms to combine");
    const size_t num_bins = locals.front().bins.size();
    std::vector<double> out(num_bins, 0.0);
    double weight_sum = 0.0;
    for (const LocalHistogram& h : locals) {
        if (h.bins.size() != num_bins)
            fail_internal("local histograms disagree on bin count (" +
                          std::to_string(h.bins.size()) + " vs " +
                          std::to_string(num_bins) + ")");
        const double w = h.sensor_size * h.sensor_size * h.sensor_size;
        if (!(w > 0.0))
            fail_internal("sensor " + std::to_string(h.sensor_id) +
                          " has non-positive size " + num(h.sensor_size));
        for (size_t b = 0; b < num_bins; ++b) out[b] += h.bins[b] * w;
        weight_sum += w;
    }
    for (double& v : out) v /= weight_sum;
    return out;
}

InteractionDescriptor aggregate(
    const std::array<std::vector<LocalHistogram>, kAttributeCount>& locals,
    int num_bins, int resolution, NormMode norm_mode,
    const std::array<double, kAttributeCount>& scales,
    const std::string& label) {
    check_bins(num_bins);
    if (resolution != 4 && resolution != 8 && resolution != 16)
        fail_input("field resolution must be 4, 8 or 16, got " +
                   std::to_string(resolution));
    for (double s : scales) check_scale(s);

    // A sensor counts as active once it tracked samples, whatever the
    // attribute values turned out to be.
    std::vector<int> active_ids;
    for (const auto& list : locals)
        for (const LocalHistogram& h : list)
            if (h.occupied_cells > 0) active_ids.push_back(h.sensor_id);
    std::sort(active_ids.begin(), active_ids.end());
    active_ids.erase(std::unique(active_ids.begin(), active_ids.end()),
                     active_ids.end());
    if (active_ids.empty())
        fail_input("no interaction captured: every sensor stayed empty");

    InteractionDescriptor d;
    d.bins = num_bins;
    d.resolution = resolution;
    d.norm_mode = norm_mode;
    d.scales = scales;
    d.active_sensors = static_cast<int>(active_ids.size());
    d.label = label;
    for (int a = 0; a < kAttributeCount; ++a) {
        std::vector<LocalHistogram> usable;
        for (const LocalHistogram& h : locals[a]) {
            if (h.attribute != a)
                fail_internal("histogram for attribute " +
                              std::to_string(h.attribute) + " filed under " +
                              std::to_string(a));
            if (!h.active) continue;
            if (static_cast<int>(h.bins.size()) != num_bins)
                fail_input("sensor " + std::to_string(h.sensor_id) +
                           " histogram has " + std::to_string(h.bins.size()) +
                           " bins, expected " + std::to_string(num_bins));
            usable.push_back(h);
        }
        if (usable.empty()) {
            // Every tracked cell scored zero for this attribute; the honest
            // summary is all mass at value zero.
            d.hist[a].assign(num_bins, 0.0);
            d.hist[a][0] = 1.0;
            continue;
        }
        // Fixed reduction order keeps the result identical however the
        // caller gathered the locals.
        std::sort(usable.begin(), usable.end(),
                  [](const LocalHistogram& x, const LocalHistogram& y) {
                      return x.sensor_id < y.sensor_id;
                  });
        std::vector<double> bins = volume_weighted_bins(usable);
        double total = 0.0;
        for (double v : bins) total += v;
        if (!(total > 0.0)) fail_internal("aggregated histogram lost all mass");
        for (double& v : bins) v /= total;
        d.hist[a] = std::move(bins);
    }
    return d;
}

BhattVariant parse_bhatt_variant(const std::string& name) {
    if (name == "coefficient") return BhattVariant::Coefficient;
    if (name == "log") return BhattVariant::Log;
    fail_input("unknown histogram distance variant '" + name +
               "' (use coefficient or log)");
}

double bhattacharyya(const std::vector<double>& h, const std::vector<double>& k,
                     BhattVariant variant) {
    if (h.size() != k.size())
        fail_incomparable("histogram bin counts differ: " +
                          std::to_string(h.size()) + " vs " +
                          std::to_string(k.size()));
    if (h.empty()) fail_input("cannot compare empty histograms");
    double sum_h = 0.0, sum_k = 0.0, bc = 0.0;
    for (size_t i = 0; i < h.size(); ++i) {
        if (h[i] < 0.0 || k[i] < 0.0)
            fail_input("histogram bin " + std::to_string(i) + " is negative");
        sum_h += h[i];
        sum_k += k[i];
        bc += std::sqrt(h[i] * k[i]);
    }
    if (std::abs(sum_h - 1.0) > 1e-6 || std::abs(sum_k - 1.0) > 1e-6)
        fail_input("histograms must be unit-sum (got " + num(sum_h) + " and " +
                   num(sum_k) + ")");
    bc = std::clamp(bc, 0.0, 1.0);
    if (variant == BhattVariant::Coefficient) return std::sqrt(1.0 - bc);
    // Disjoint support would give -ln(0); cap the distance instead of
    // returning infinity so weighted sums stay finite.
    return -std::log(std::max(bc, 1e-12));
}

double distance(const InteractionDescriptor& a, const InteractionDescriptor& b,
                const AttributeWeights& weights, BhattVariant variant) {
    if (a.bins != b.bins)
        fail_incomparable("descriptors differ in bin count: " +
                          std::to_string(a.bins) + " vs " +
                          std::to_string(b.bins));
    if (a.resolution != b.resolution)
        fail_incomparable("descriptors differ in field resolution: " +
                          std::to_string(a.resolution) + " vs " +
                          std::to_string(b.resolution));
    if (a.norm_mode != b.norm_mode)
        fail_incomparable("descriptors differ in normalization mode: " +
                          norm_mode_name(a.norm_mode) + " vs " +
                          norm_mode_name(b.norm_mode));
    for (int i = 0; i < kAttributeCount; ++i)
        if (a.scales[i] != b.scales[i])
            fail_incomparable("descriptors differ in " + kAttributeNames[i] +
                              " scale: " + num(a.scales[i]) + " vs " +
                              num(b.scales[i]));
    if (a.active_sensors == 0 || b.active_sensors == 0)
        fail_input("cannot compare a descriptor with no active sensors");
    double sum_w = 0.0;
    for (double w : weights.w) {
        if (w < 0.0 || !std::isfinite(w))
            fail_input("attribute weights must be finite and non-negative");
        sum_w += w;
    }
    if (!(sum_w > 0.0))
        fail_input("at least one attribute weight must be positive");
    double total = 0.0;
    for (int i = 0; i < kAttributeCount; ++i) {
        if (weights.w[i] == 0.0) continue;
        total += weights.w[i] * bhattacharyya(a.hist[i], b.hist[i], variant);
    }
    return total / kAttributeCount;
}

namespace {

void append_doubles(std::string& out, const double* v, size_t n) {
    char buf[64];
    for (size_t i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof(buf), " %.12g", v[i]);
        out += buf;
    }
}

// Line-oriented reader that tracks byte offsets for error reporting.
struct TextCursor {
    const std::string& text;
    size_t pos = 0;
    size_t line_start = 0;

    explicit TextCursor(const std::string& t) : text(t) {}

    [[noreturn]] void fail(const std::string& what) const {
        fail_input("descriptor parse error at byte " +
                   std::to_string(line_start) + ": " + what);
    }

    // Next non-empty line, or empty string at end of input.
    std::string next_line() {
        while (pos < text.size()) {
            line_start = pos;
            size_t end = text.find('\n', pos);
            if (end == std::string::npos) end = text.size();
            std::string line = text.substr(pos, end - pos);
            pos = end + 1;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return line;
        }
        line_start = text.size();
        return "";
    }
};

// Splits "key v0 v1 ..." and checks the key; returns the value part.
std::string expect_field(TextCursor& cur, const std::string& key) {
    const std::string line = cur.next_line();
    if (line.empty()) cur.fail("missing field '" + key + "'");
    const size_t space = line.find(' ');
    const std::string head = line.substr(0, space);
    if (head != key)
        cur.fail("expected field '" + key + "', found '" + head + "'");
    return space == std::string::npos ? std::string() : line.substr(space + 1);
}

long parse_int(TextCursor& cur, const std::string& value,
               const std::string& key) {
    char* end = nullptr;
    const long v = std::strtol(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0')
        cur.fail("field '" + key + "' is not an integer");
    return v;
}

std::vector<double> parse_doubles(TextCursor& cur, const std::string& value,
                                  const std::string& key, size_t expected) {
    std::vector<double> out;
    const char* p = value.c_str();
    while (*p != '\0') {
        while (*p == ' ') ++p;
        if (*p == '\0') break;
        char* end = nullptr;
        const double v = std::strtod(p, &end);
        if (end == p || (*end != '\0' && *end != ' '))
            cur.fail("field '" + key + "' has a malformed number");
        if (!std::isfinite(v))
            cur.fail("field '" + key + "' has a non-finite value");
        out.push_back(v);
        p = end;
    }
    if (out.size() != expected)
        cur.fail("field '" + key + "' needs " + std::to_string(expected) +
                 " values, found " + std::to_string(out.size()));
    return out;
}

} // namespace

std::string descriptor_to_text(const InteractionDescriptor& d) {
    if (d.version != 1)
        fail_input("unsupported descriptor version " + std::to_string(d.version));
    if (d.label.find('\n') != std::string::npos ||
        d.label.find('\r') != std::string::npos)
        fail_input("descriptor label must not contain line breaks");
    std::string out;
    out += "version 1\n";
    out += "bins " + std::to_string(d.bins) + "\n";
    out += "resolution " + std::to_string(d.resolution) + "\n";
    out += "norm_mode " + norm_mode_name(d.norm_mode) + "\n";
    out += "scales";
    append_doubles(out, d.scales.data(), d.scales.size());
    out += "\n";
    out += "active_sensors " + std::to_string(d.active_sensors) + "\n";
    out += "label";
    if (!d.label.empty()) out += " " + d.label;
    out += "\n";
    for (int a = 0; a < kAttributeCount; ++a) {
        if (static_cast<int>(d.hist[a].size()) != d.bins)
            fail_internal("histogram " + kAttributeNames[a] + " has " +
                          std::to_string(d.hist[a].size()) +
                          " bins, descriptor says " + std::to_string(d.bins));
        out += "hist_" + kAttributeNames[a];
        append_doubles(out, d.hist[a].data(), d.hist[a].size());
        out += "\n";
    }
    return out;
}

InteractionDescriptor descriptor_from_text(const std::string& text) {
    TextCursor cur(text);
    InteractionDescriptor d;

    const long version = parse_int(cur, expect_field(cur, "version"), "version");
    if (version != 1)
        cur.fail("unsupported version " + std::to_string(version));
    d.version = 1;

    const long bins = parse_int(cur, expect_field(cur, "bins"), "bins");
    if (bins < 2 || bins > 4096) cur.fail("bin count out of range");
    d.bins = static_cast<int>(bins);

    const long res = parse_int(cur, expect_field(cur, "resolution"), "resolution");
    if (res != 4 && res != 8 && res != 16)
        cur.fail("resolution must be 4, 8 or 16");
    d.resolution = static_cast<int>(res);

    {
        const std::string value = expect_field(cur, "norm_mode");
        if (value == "average") d.norm_mode = NormMode::Average;
        else if (value == "direction") d.norm_mode = NormMode::Direction;
        else cur.fail("norm_mode must be average or direction");
    }

    {
        const std::vector<double> s =
            parse_doubles(cur, expect_field(cur, "scales"), "scales",
                          kAttributeCount);
        for (int i = 0; i < kAttributeCount; ++i) {
            if (!(s[i] > 0.0)) cur.fail("scales must be positive");
            d.scales[i] = s[i];
        }
    }

    const long active = parse_int(cur, expect_field(cur, "active_sensors"),
                                  "active_sensors");
    if (active < 0) cur.fail("active_sensors must be non-negative");
    d.active_sensors = static_cast<int>(active);

    d.label = expect_field(cur, "label");

    for (int a = 0; a < kAttributeCount; ++a) {
        const std::string key = "hist_" + kAttributeNames[a];
        std::vector<double> h =
            parse_doubles(cur, expect_field(cur, key), key,
                          static_cast<size_t>(d.bins));
        double total = 0.0;
        for (double v : h) {
            if (v < 0.0) cur.fail("histogram bins must be non-negative");
            total += v;
        }
        if (d.active_sensors > 0) {
            if (std::abs(total - 1.0) > 1e-6) cur.fail("histogram is not unit-sum");
        } else if (total != 0.0) {
            cur.fail("descriptor with no active sensors must have zero histograms");
        }
        d.hist[a] = std::move(h);
    }

    const std::string extra = cur.next_line();
    if (!extra.empty()) cur.fail("unexpected trailing content");
    return d;
}

void save_descriptor(const std::string& path, const InteractionDescriptor& d) {
    const std::string text = descriptor_to_text(d);
    std::ofstream out(path, std::ios::binary);
    if (!out) fail_input("cannot write descriptor file '" + path + "'");
    out << text;
    if (!out.flush())
        fail_input("failed writing descriptor file '" + path + "'");
}

InteractionDescriptor load_descriptor(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_input("cannot read descriptor file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return descriptor_from_text(buffer.str());
}

} // namespace ilscape
