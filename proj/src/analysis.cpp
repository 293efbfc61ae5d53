#include "ilscape/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "ilscape/error.hpp"
#include "ilscape/parallel.hpp"

namespace ilscape {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

void check_weights(const AttributeWeights& weights) {
    double sum = 0.0;
    for (double w : weights.w) {
        if (w < 0.0 || !std::isfinite(w))
            fail_input("attribute weights must be finite and non-negative");
        sum += w;
    }
    if (!(sum > 0.0))
        fail_input("at least one attribute weight must be positive");
}

void check_histograms(const InteractionDescriptor& d, const std::string& what) {
    for (int a = 0; a < kAttributeCount; ++a) {
        if (static_cast<int>(d.hist[a].size()) != d.bins)
            fail_input(what + ": histogram " + kAttributeNames[a] + " has " +
                       std::to_string(d.hist[a].size()) + " bins, expected " +
                       std::to_string(d.bins));
        double total = 0.0;
        for (double v : d.hist[a]) {
            if (v < 0.0 || !std::isfinite(v))
                fail_input(what + ": histogram " + kAttributeNames[a] +
                           " has a negative or non-finite bin");
            total += v;
        }
        if (d.active_sensors > 0) {
            if (std::abs(total - 1.0) > 1e-6)
                fail_input(what + ": histogram " + kAttributeNames[a] +
                           " is not unit-sum");
        } else if (total != 0.0) {
            fail_input(what + ": descriptor with no active sensors carries " +
                       "nonzero histograms");
        }
    }
}

bool same_layout(const InteractionDescriptor& a,
                 const InteractionDescriptor& b) {
    return a.bins == b.bins && a.resolution == b.resolution &&
           a.norm_mode == b.norm_mode && a.scales == b.scales;
}

// Shared ranking + PR core for retrieve and predict. The first distance
// call validates comparability serially so the parallel loop cannot
// throw from a worker thread.
RetrievalResult rank_pool(const std::vector<const DbEntry*>& pool,
                          const std::vector<const InteractionDescriptor*>& descs,
                          const InteractionDescriptor& query, size_t top_k,
                          const AttributeWeights& weights,
                          BhattVariant variant) {
    RetrievalResult result;
    if (pool.empty()) return result;
    std::vector<double> dist(pool.size(), 0.0);
    dist[0] = distance(query, *descs[0], weights, variant);
    parallel_for(pool.size() - 1, [&](size_t i) {
        dist[i + 1] = distance(query, *descs[i + 1], weights, variant);
    });

    std::vector<size_t> order(pool.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (dist[a] != dist[b]) return dist[a] < dist[b];
        return pool[a]->id < pool[b]->id;
    });

    std::vector<RankedMatch> full;
    full.reserve(pool.size());
    for (size_t i : order)
        full.push_back({pool[i]->id, pool[i]->label, dist[i]});

    if (!query.label.empty()) {
        for (const DbEntry* e : pool)
            if (e->label.empty())
                fail_input("precision/recall needs a fully labeled database");
        result.pr = pr_curve(full, query.label);
        result.pr_valid = !result.pr.empty();
    }
    if (full.size() > top_k) full.resize(top_k);
    result.matches = std::move(full);
    return result;
}

} // namespace

int db_add(DescriptorDB& db, DbEntry entry) {
    if (entry.id < 0)
        fail_input("database ids must be non-negative, got " +
                   std::to_string(entry.id));
    for (const DbEntry& e : db.entries)
        if (e.id == entry.id)
            fail_input("duplicate database id " + std::to_string(entry.id));
    const std::string what = "entry " + std::to_string(entry.id);
    check_histograms(entry.descriptor, what);
    if (entry.descriptor.active_sensors <= 0)
        fail_input(what + ": descriptor captured no interaction");
    if (!db.entries.empty()) {
        // Throws with the offending field named if the layouts differ.
        (void)distance(entry.descriptor, db.entries.front().descriptor);
    }
    for (size_t k = 0; k < entry.segments.size(); ++k) {
        const std::string seg = what + " segment " + std::to_string(k + 1);
        check_histograms(entry.segments[k], seg);
        if (!same_layout(entry.segments[k], entry.descriptor))
            fail_incomparable(seg + " does not match the entry's layout");
    }
    db.entries.push_back(std::move(entry));
    return static_cast<int>(db.entries.size()) - 1;
}

const DbEntry* db_find(const DescriptorDB& db, int id) {
    for (const DbEntry& e : db.entries)
        if (e.id == id) return &e;
    return nullptr;
}

std::vector<std::vector<double>> distance_matrix(const DescriptorDB& db,
                                                 const AttributeWeights& weights,
                                                 BhattVariant variant) {
    const size_t n = db.entries.size();
    if (n < 2) fail_input("distance matrix needs at least 2 entries");
    check_weights(weights);
    // Validates comparability and histogram health up front; afterwards
    // the parallel workers cannot throw.
    for (size_t i = 0; i < n; ++i)
        (void)distance(db.entries[i].descriptor, db.entries.front().descriptor,
                       weights, variant);

    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    parallel_for(n, [&](size_t i) {
        for (size_t j = i + 1; j < n; ++j)
            m[i][j] = distance(db.entries[i].descriptor,
                               db.entries[j].descriptor, weights, variant);
    });
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) m[j][i] = m[i][j];
    return m;
}

std::vector<PrPoint> pr_curve(const std::vector<RankedMatch>& ranking,
                              const std::string& positive_label) {
    if (positive_label.empty())
        fail_input("precision/recall needs a non-empty query label");
    size_t relevant = 0;
    for (const RankedMatch& m : ranking)
        if (m.label == positive_label) ++relevant;
    if (relevant == 0) return {};

    std::vector<PrPoint> pr;
    pr.reserve(relevant);
    size_t tp = 0;
    for (size_t rank = 0; rank < ranking.size(); ++rank) {
        if (ranking[rank].label != positive_label) continue;
        ++tp;
        pr.push_back({static_cast<double>(tp) / relevant,
                      static_cast<double>(tp) / (rank + 1)});
        if (tp == relevant) break;
    }
    // Interpolate: precision at a recall level is the best precision at
    // that level or beyond.
    for (size_t i = pr.size(); i-- > 1;)
        pr[i - 1].precision = std::max(pr[i - 1].precision, pr[i].precision);
    return pr;
}

double precision_at(const std::vector<PrPoint>& pr, double recall) {
    if (pr.empty()) fail_input("empty precision/recall curve");
    for (const PrPoint& p : pr)
        if (p.recall >= recall - 1e-12) return p.precision;
    fail_input("recall level " + num(recall) + " is never reached");
}

RetrievalResult retrieve(const DescriptorDB& db,
                         const InteractionDescriptor& query, int top_k,
                         const AttributeWeights& weights,
                         BhattVariant variant) {
    if (db.entries.empty()) fail_input("cannot retrieve from an empty database");
    if (top_k < 1) fail_input("top_k must be positive");
    check_histograms(query, "query");
    if (query.active_sensors <= 0)
        fail_input("query descriptor captured no interaction");
    std::vector<const DbEntry*> pool;
    std::vector<const InteractionDescriptor*> descs;
    for (const DbEntry& e : db.entries) {
        pool.push_back(&e);
        descs.push_back(&e.descriptor);
    }
    return rank_pool(pool, descs, query, static_cast<size_t>(top_k), weights,
                     variant);
}

LooResult loo_nearest(const DescriptorDB& db, const AttributeWeights& weights,
                      BhattVariant variant) {
    const size_t n = db.entries.size();
    if (n < 2) fail_input("leave-one-out needs at least 2 entries");
    for (const DbEntry& e : db.entries)
        if (e.label.empty())
            fail_input("leave-one-out needs a fully labeled database");
    const std::vector<std::vector<double>> m =
        distance_matrix(db, weights, variant);
    LooResult result;
    result.total = static_cast<int>(n);
    result.nearest.resize(n, -1);
    for (size_t i = 0; i < n; ++i) {
        size_t best = n;
        for (size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            if (best == n || m[i][j] < m[i][best] ||
                (m[i][j] == m[i][best] &&
                 db.entries[j].id < db.entries[best].id))
                best = j;
        }
        result.nearest[i] = db.entries[best].id;
        if (db.entries[best].label == db.entries[i].label) ++result.correct;
    }
    result.accuracy = static_cast<double>(result.correct) / result.total;
    return result;
}

ClassSpread class_spread(const DescriptorDB& db,
                         const std::vector<std::vector<double>>& matrix) {
    const size_t n = db.entries.size();
    if (matrix.size() != n)
        fail_input("distance matrix size does not match the database");
    double intra = 0.0, inter = 0.0;
    size_t n_intra = 0, n_inter = 0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            if (db.entries[i].label == db.entries[j].label) {
                intra += matrix[i][j];
                ++n_intra;
            } else {
                inter += matrix[i][j];
                ++n_inter;
            }
        }
    ClassSpread s;
    if (n_intra > 0) s.intra = intra / n_intra;
    if (n_inter > 0) s.inter = inter / n_inter;
    return s;
}

std::vector<std::array<double, 2>> mds_embed(
    const std::vector<std::vector<double>>& dist) {
    const size_t n = dist.size();
    if (n < 3) fail_input("MDS needs at least 3 points");
    for (size_t i = 0; i < n; ++i) {
        if (dist[i].size() != n)
            fail_input("distance matrix is not square");
        if (std::abs(dist[i][i]) > 1e-9)
            fail_input("distance matrix diagonal is not zero");
        for (size_t j = 0; j < n; ++j) {
            if (!std::isfinite(dist[i][j]) || dist[i][j] < 0.0)
                fail_input("distances must be finite and non-negative");
            if (std::abs(dist[i][j] - dist[j][i]) > 1e-9)
                fail_input("distance matrix is not symmetric");
        }
    }

    Eigen::MatrixXd d2(n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) d2(i, j) = sqr(dist[i][j]);
    const Eigen::VectorXd row_mean = d2.rowwise().mean();
    const double grand_mean = d2.mean();
    Eigen::MatrixXd b(n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            b(i, j) = -0.5 * (d2(i, j) - row_mean(i) - row_mean(j) + grand_mean);

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
    if (es.info() != Eigen::Success)
        fail_internal("eigen decomposition failed in MDS");

    std::vector<std::array<double, 2>> points(n, {0.0, 0.0});
    for (int axis = 0; axis < 2; ++axis) {
        const Eigen::Index idx = static_cast<Eigen::Index>(n) - 1 - axis;
        const double lambda = std::max(0.0, es.eigenvalues()(idx));
        Eigen::VectorXd coord = es.eigenvectors().col(idx) * std::sqrt(lambda);
        for (Eigen::Index i = 0; i < coord.size(); ++i) {
            if (std::abs(coord(i)) <= 1e-12) continue;
            if (coord(i) < 0.0) coord = -coord;
            break;
        }
        for (size_t i = 0; i < n; ++i) points[i][axis] = coord(i);
    }
    return points;
}

double mds_error(const std::vector<std::vector<double>>& dist,
                 const std::vector<std::array<double, 2>>& points) {
    const size_t n = dist.size();
    if (points.size() != n)
        fail_input("point list does not match the distance matrix");
    double sum = 0.0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            const double dx = points[i][0] - points[j][0];
            const double dy = points[i][1] - points[j][1];
            sum += sqr(std::sqrt(dx * dx + dy * dy) - dist[i][j]);
        }
    return std::sqrt(sum);
}

int SensorFieldSet::find(int sensor_id) const {
    const auto it =
        std::lower_bound(sensor_ids.begin(), sensor_ids.end(), sensor_id);
    if (it == sensor_ids.end() || *it != sensor_id) return -1;
    return static_cast<int>(it - sensor_ids.begin());
}

SaliencyMap saliency(const Mesh& mesh, const SensorTree& tree,
                     const SensorFieldSet& fields,
                     const AttributeWeights& weights, double radius) {
    check_weights(weights);
    if (!(radius >= 0.0) || !std::isfinite(radius))
        fail_input("saliency radius must be non-negative");
    if (fields.fields.size() != fields.sensor_ids.size() ||
        fields.grids.size() != fields.sensor_ids.size())
        fail_internal("sensor field set arrays disagree in length");

    const size_t nv = mesh.vertices.size();
    SaliencyMap map;
    map.radius = radius;
    map.weights = weights;
    map.values.assign(nv, 0.0);
    std::vector<char> outside(nv, 0);

    parallel_for(nv, [&](size_t vi) {
        const Vec3& v = mesh.vertices[vi];
        const int sid = tree.locate(v);
        if (sid < 0) {
            outside[vi] = 1;
            return;
        }
        const int fi = fields.find(sid);
        if (fi < 0) return; // sensor tracked nothing: zero contribution
        const VectorField& field = fields.fields[fi];
        const AttributeGrids& grids = fields.grids[fi];
        const int n = field.resolution;
        const double h = field.cell_size();
        auto clamp_cell = [n](double x) {
            return std::min(std::max(static_cast<int>(x), 0), n - 1);
        };
        const Vec3 rel = (v - field.box.min()) / h;
        const int ci = clamp_cell(rel.x());
        const int cj = clamp_cell(rel.y());
        const int ck = clamp_cell(rel.z());
        const Vec3 center = field.cell_center(ci, cj, ck);

        const int reach = static_cast<int>(radius / h) + 1;
        std::array<double, kAttributeCount> sum{};
        int cells = 0;
        for (int k = std::max(0, ck - reach); k <= std::min(n - 1, ck + reach); ++k)
            for (int j = std::max(0, cj - reach); j <= std::min(n - 1, cj + reach); ++j)
                for (int i = std::max(0, ci - reach); i <= std::min(n - 1, ci + reach); ++i) {
                    if ((field.cell_center(i, j, k) - center).norm() >
                        radius + 1e-12)
                        continue;
                    const size_t c = field.index(i, j, k);
                    for (int a = 0; a < kAttributeCount; ++a)
                        sum[a] += grids.values[a][c];
                    ++cells;
                }
        double s = 0.0;
        for (int a = 0; a < kAttributeCount; ++a)
            s += weights.w[a] * (sum[a] / cells);
        map.values[vi] = s;
    });

    size_t n_outside = 0;
    for (char o : outside) n_outside += o;
    if (n_outside > 0)
        warn(std::to_string(n_outside) +
             " vertices lie outside the interaction space; their saliency is 0");

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double s : map.values) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    if (hi - lo > 0.0) {
        for (double& s : map.values) s = (s - lo) / (hi - lo);
    } else {
        // Constant map: nothing stands out.
        std::fill(map.values.begin(), map.values.end(), 0.0);
    }
    return map;
}

std::vector<RegionMatch> correspondence(const Mesh& mesh1,
                                        const SaliencyMap& map1,
                                        const Mesh& mesh2,
                                        const SaliencyMap& map2,
                                        int grid_res) {
    if (grid_res < 2 || grid_res > 256)
        fail_input("correspondence grid resolution must be in [2, 256], got " +
                   std::to_string(grid_res));
    if (map1.values.size() != mesh1.vertices.size() ||
        map2.values.size() != mesh2.vertices.size())
        fail_input("saliency map does not match its mesh");

    const int n = grid_res;
    const size_t cells = static_cast<size_t>(n) * n * n;
    std::array<std::vector<double>, 2> sum;
    std::array<std::vector<int>, 2> cnt;
    for (int s = 0; s < 2; ++s) {
        sum[s].assign(cells, 0.0);
        cnt[s].assign(cells, 0);
    }

    const auto splat = [&](const Mesh& mesh, const SaliencyMap& map, int s) {
        const Vec3 lo = mesh.bounds.min();
        const double scale = mesh.bounds.sizes().maxCoeff();
        if (!(scale > 0.0)) fail_input("mesh has no spatial extent");
        for (size_t vi = 0; vi < mesh.vertices.size(); ++vi) {
            const Vec3 p = (mesh.vertices[vi] - lo) / scale;
            const auto cell = [n](double x) {
                return std::min(std::max(static_cast<int>(x * n), 0), n - 1);
            };
            const size_t c =
                cell(p.x()) +
                static_cast<size_t>(n) * (cell(p.y()) + static_cast<size_t>(n) * cell(p.z()));
            sum[s][c] += map.values[vi];
            cnt[s][c] += 1;
        }
    };
    splat(mesh1, map1, 0);
    splat(mesh2, map2, 1);

    std::vector<RegionMatch> matches;
    for (size_t c = 0; c < cells; ++c) {
        if (cnt[0][c] == 0 || cnt[1][c] == 0) continue;
        RegionMatch m;
        m.i = static_cast<int>(c % n);
        m.j = static_cast<int>((c / n) % n);
        m.k = static_cast<int>(c / (static_cast<size_t>(n) * n));
        m.s1 = sum[0][c] / cnt[0][c];
        m.s2 = sum[1][c] / cnt[1][c];
        m.score = 1.0 - std::abs(m.s1 - m.s2);
        matches.push_back(m);
    }
    std::sort(matches.begin(), matches.end(),
              [n](const RegionMatch& a, const RegionMatch& b) {
                  const double da = std::abs(a.s1 - a.s2);
                  const double db = std::abs(b.s1 - b.s2);
                  if (da != db) return da < db;
                  const size_t la = a.i + static_cast<size_t>(n) * (a.j + static_cast<size_t>(n) * a.k);
                  const size_t lb = b.i + static_cast<size_t>(n) * (b.j + static_cast<size_t>(n) * b.k);
                  return la < lb;
              });
    return matches;
}

RetrievalResult predict(const DescriptorDB& db,
                        const InteractionDescriptor& query_segment,
                        int segment_k, const AttributeWeights& weights,
                        BhattVariant variant) {
    if (db.entries.empty()) fail_input("cannot predict from an empty database");
    if (segment_k < 1)
        fail_input("segment index must be at least 1, got " +
                   std::to_string(segment_k));
    for (const DbEntry& e : db.entries)
        if (e.segments.size() < static_cast<size_t>(segment_k))
            fail_input("entry " + std::to_string(e.id) + " stores " +
                       std::to_string(e.segments.size()) +
                       " segments, cannot predict at span " +
                       std::to_string(segment_k));
    check_histograms(query_segment, "query segment");
    if (query_segment.active_sensors <= 0)
        fail_input("query segment captured no interaction");

    std::vector<const DbEntry*> pool;
    std::vector<const InteractionDescriptor*> descs;
    for (const DbEntry& e : db.entries) {
        const InteractionDescriptor& seg = e.segments[segment_k - 1];
        if (seg.active_sensors <= 0) continue; // nothing captured yet
        pool.push_back(&e);
        descs.push_back(&seg);
    }
    return rank_pool(pool, descs, query_segment, pool.size(), weights, variant);
}

namespace {

std::string num12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail_input("cannot write: " + path);
    return out;
}

} // namespace

void write_distance_matrix_csv(const std::string& path, const DescriptorDB& db,
                               const std::vector<std::vector<double>>& matrix) {
    if (matrix.size() != db.entries.size())
        fail_input("distance matrix size does not match the database");
    std::ofstream out = open_out(path);
    out << "id";
    for (const DbEntry& e : db.entries) out << "," << e.id;
    out << "\n";
    for (size_t i = 0; i < matrix.size(); ++i) {
        out << db.entries[i].id;
        for (size_t j = 0; j < matrix[i].size(); ++j)
            out << "," << num12(matrix[i][j]);
        out << "\n";
    }
}

void write_pr_csv(const std::string& path, const std::vector<PrPoint>& pr) {
    std::ofstream out = open_out(path);
    out << "recall,precision\n";
    for (const PrPoint& p : pr)
        out << num(p.recall) << "," << num(p.precision) << "\n";
}

void write_mds_csv(const std::string& path, const DescriptorDB& db,
                   const std::vector<std::array<double, 2>>& points) {
    if (points.size() != db.entries.size())
        fail_input("MDS point list does not match the database");
    std::ofstream out = open_out(path);
    out << "id,label,x,y\n";
    for (size_t i = 0; i < points.size(); ++i)
        out << db.entries[i].id << "," << db.entries[i].label << ","
            << num(points[i][0]) << "," << num(points[i][1]) << "\n";
}

void write_mds_svg(const std::string& path, const DescriptorDB& db,
                   const std::vector<std::array<double, 2>>& points) {
    if (points.size() != db.entries.size())
        fail_input("MDS point list does not match the database");
    static const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c",
                                     "#d62728", "#9467bd", "#8c564b",
                                     "#e377c2", "#7f7f7f"};
    constexpr int kPaletteSize = 8;

    std::vector<std::string> labels;
    for (const DbEntry& e : db.entries) labels.push_back(e.label);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    const auto color_of = [&](const std::string& label) {
        const size_t idx =
            std::lower_bound(labels.begin(), labels.end(), label) -
            labels.begin();
        return kPalette[idx % kPaletteSize];
    };

    double lo_x = 0, hi_x = 0, lo_y = 0, hi_y = 0;
    for (size_t i = 0; i < points.size(); ++i) {
        if (i == 0) {
            lo_x = hi_x = points[i][0];
            lo_y = hi_y = points[i][1];
            continue;
        }
        lo_x = std::min(lo_x, points[i][0]);
        hi_x = std::max(hi_x, points[i][0]);
        lo_y = std::min(lo_y, points[i][1]);
        hi_y = std::max(hi_y, points[i][1]);
    }
    const double span =
        std::max({hi_x - lo_x, hi_y - lo_y, 1e-12});
    const double cx = 0.5 * (lo_x + hi_x);
    const double cy = 0.5 * (lo_y + hi_y);
    const double plot = 660.0; // drawing area inside the margins
    const auto sx = [&](double x) { return 400.0 + (x - cx) / span * plot; };
    const auto sy = [&](double y) { return 400.0 - (y - cy) / span * plot; };

    std::ofstream out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 800\">\n"
        << "<rect width=\"800\" height=\"800\" fill=\"white\"/>\n"
        << "<rect x=\"40\" y=\"40\" width=\"720\" height=\"720\" fill=\"none\""
        << " stroke=\"#999\"/>\n";
    for (size_t i = 0; i < points.size(); ++i)
        out << "<circle cx=\"" << num(sx(points[i][0])) << "\" cy=\""
            << num(sy(points[i][1])) << "\" r=\"7\" fill=\""
            << color_of(db.entries[i].label)
            << "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
    for (size_t i = 0; i < labels.size(); ++i) {
        const double y = 56.0 + 24.0 * i;
        out << "<rect x=\"52\" y=\"" << num(y - 12)
            << "\" width=\"14\" height=\"14\" fill=\""
            << kPalette[i % kPaletteSize] << "\"/>\n"
            << "<text x=\"72\" y=\"" << num(y)
            << "\" font-family=\"sans-serif\" font-size=\"16\">"
            << (labels[i].empty() ? "(unlabeled)" : labels[i]) << "</text>\n";
    }
    out << "</svg>\n";
}

void write_saliency_csv(const std::string& path, const SaliencyMap& map) {
    std::ofstream out = open_out(path);
    out << "vertex_id,saliency\n";
    for (size_t i = 0; i < map.values.size(); ++i)
        out << i << "," << num(map.values[i]) << "\n";
}

void write_matches_csv(const std::string& path,
                       const std::vector<RegionMatch>& matches) {
    std::ofstream out = open_out(path);
    out << "i,j,k,s1,s2,score\n";
    for (const auto& m : matches)
        out << m.i << "," << m.j << "," << m.k << "," << num(m.s1) << ","
            << num(m.s2) << "," << num(m.score) << "\n";
}

void write_saliency_obj(const std::string& path, const Mesh& mesh,
                        const SaliencyMap& map) {
    if (map.values.size() != mesh.vertices.size())
        fail_input("saliency map does not match its mesh");
    std::ofstream out = open_out(path);
    for (size_t i = 0; i < mesh.vertices.size(); ++i) {
        const Vec3& v = mesh.vertices[i];
        const double s = map.values[i];
        // Cold-to-hot ramp stored in the color extension columns.
        out << "v " << num(v.x()) << " " << num(v.y()) << " " << num(v.z())
            << " " << num(s) << " 0 " << num(1.0 - s) << "\n";
    }
    for (const auto& t : mesh.triangles)
        out << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
}

} // namespace ilscape
