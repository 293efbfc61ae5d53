#pragma once

#include <array>
#include <string>
#include <vector>

#include "ilscape/descriptor.hpp"
#include "ilscape/sensor_grid.hpp"

namespace ilscape {

// One stored interaction: the full descriptor plus, when prediction is
// wanted, the cumulative-window segment descriptors.
struct DbEntry {
    int id = -1;
    std::string label;
    InteractionDescriptor descriptor;
    std::vector<InteractionDescriptor> segments;
};

// All entries stay mutually comparable; ids are unique.
struct DescriptorDB {
    std::vector<DbEntry> entries;
};

// Validates the entry against the database invariants and appends it.
// Returns the entry's index.
int db_add(DescriptorDB& db, DbEntry entry);
const DbEntry* db_find(const DescriptorDB& db, int id);

// D[i][j] = distance(entry i, entry j); symmetric with a zero diagonal.
std::vector<std::vector<double>> distance_matrix(
    const DescriptorDB& db, const AttributeWeights& weights = {},
    BhattVariant variant = BhattVariant::Coefficient);

struct RankedMatch {
    int id = -1;
    std::string label;
    double dist = 0.0;
};

struct PrPoint {
    double recall = 0.0;
    double precision = 0.0;
};

struct RetrievalResult {
    std::vector<RankedMatch> matches; // ascending distance, ties by id
    std::vector<PrPoint> pr;          // interpolated, one point per hit
    bool pr_valid = false;            // false: unlabeled query or empty class
};

// Interpolated precision/recall down a ranking: a point per relevant hit,
// precision replaced by the best precision at that recall or beyond.
std::vector<PrPoint> pr_curve(const std::vector<RankedMatch>& ranking,
                              const std::string& positive_label);

// Interpolated precision at the first recall level >= recall.
double precision_at(const std::vector<PrPoint>& pr, double recall);

// Rank the database by distance to the query. The PR curve uses the full
// ranking and the query's label; matches are clamped to top_k.
RetrievalResult retrieve(const DescriptorDB& db,
                         const InteractionDescriptor& query, int top_k,
                         const AttributeWeights& weights = {},
                         BhattVariant variant = BhattVariant::Coefficient);

// Leave-one-out nearest neighbor over the whole database.
struct LooResult {
    int correct = 0;
    int total = 0;
    double accuracy = 0.0;
    std::vector<int> nearest; // nearest entry id per entry, in db order
};

LooResult loo_nearest(const DescriptorDB& db,
                      const AttributeWeights& weights = {},
                      BhattVariant variant = BhattVariant::Coefficient);

// Mean same-label vs different-label distance over a distance matrix.
struct ClassSpread {
    double intra = 0.0;
    double inter = 0.0;
};

ClassSpread class_spread(const DescriptorDB& db,
                         const std::vector<std::vector<double>>& matrix);

// Classical (Torgerson) scaling of a symmetric zero-diagonal distance
// matrix to 2D: eigenpairs of -1/2 J D^2 J, axes ordered by eigenvalue,
// each axis' first nonzero coordinate made positive.
std::vector<std::array<double, 2>> mds_embed(
    const std::vector<std::vector<double>>& dist);

// Frobenius norm of (embedded pairwise distances - input distances);
// ~0 when the input is realizable in the plane.
double mds_error(const std::vector<std::vector<double>>& dist,
                 const std::vector<std::array<double, 2>>& points);

// Per-sensor fields and attribute grids for the sensors that tracked
// samples, sorted by sensor id.
struct SensorFieldSet {
    std::vector<int> sensor_ids;
    std::vector<VectorField> fields;
    std::vector<AttributeGrids> grids;

    // Index into the parallel arrays, or -1 if the sensor stayed empty.
    int find(int sensor_id) const;
};

struct SaliencyMap {
    std::vector<double> values; // one per vertex, min-max mapped to [0,1]
    double radius = 0.0;
    AttributeWeights weights;
};

// Weighted attribute mean around each vertex's cell: all cells of the
// vertex's sensor whose centers lie within radius of the containing
// cell's center contribute. Vertices outside the space score 0 (with a
// warning); a constant map normalizes to all zeros.
SaliencyMap saliency(const Mesh& mesh, const SensorTree& tree,
                     const SensorFieldSet& fields,
                     const AttributeWeights& weights, double radius);

struct RegionMatch {
    int i = 0, j = 0, k = 0; // cell in the canonical unit grid
    double s1 = 0.0, s2 = 0.0;
    double score = 0.0; // 1 - |s1 - s2|
};

// Match same-index cells of a uniform grid over both meshes (each
// normalized to the unit bounding cube): cells occupied by vertices of
// both shapes, ranked by ascending saliency difference.
std::vector<RegionMatch> correspondence(const Mesh& mesh1,
                                        const SaliencyMap& map1,
                                        const Mesh& mesh2,
                                        const SaliencyMap& map2, int grid_res);

// Nearest neighbors using only segment k (1-based) of every entry.
// Entries whose segment k captured nothing are skipped.
RetrievalResult predict(const DescriptorDB& db,
                        const InteractionDescriptor& query_segment,
                        int segment_k, const AttributeWeights& weights = {},
                        BhattVariant variant = BhattVariant::Coefficient);

// Plain-text artifacts.
void write_distance_matrix_csv(const std::string& path,
                               const DescriptorDB& db,
                               const std::vector<std::vector<double>>& matrix);
void write_pr_csv(const std::string& path, const std::vector<PrPoint>& pr);
void write_mds_csv(const std::string& path, const DescriptorDB& db,
                   const std::vector<std::array<double, 2>>& points);
void write_mds_svg(const std::string& path, const DescriptorDB& db,
                   const std::vector<std::array<double, 2>>& points);
void write_saliency_csv(const std::string& path, const SaliencyMap& map);
void write_matches_csv(const std::string& path,
                       const std::vector<RegionMatch>& matches);
// OBJ with the saliency painted into per-vertex colors (blue cold to
// red hot).
void write_saliency_obj(const std::string& path, const Mesh& mesh,
                        const SaliencyMap& map);

} // namespace ilscape
