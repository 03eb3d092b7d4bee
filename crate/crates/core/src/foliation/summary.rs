use serde::Serialize;

use super::RegionMap;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionLeafInfo {
    pub label: usize,
    pub rank: usize,
    pub cells: usize,
    /// Dimension of the region's image in the leaf space (equals the rank).
    pub physical_dimension: usize,
    pub leaf_dimension: usize,
    pub touches_boundary: bool,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeafSpaceReport {
    pub dimension: usize,
    pub regions: Vec<RegionLeafInfo>,
    pub rank_zero_regions: usize,
    pub excluded_cells: usize,
    pub summary: String,
}

impl LeafSpaceReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Image of each region in the space of leaves. Rank-0 regions collapse to a
/// point; a rank-2k region maps onto a 2k-dimensional piece.
pub fn leaf_space_summary(map: &RegionMap) -> LeafSpaceReport {
    let n = map.grid().dim();
    let regions: Vec<RegionLeafInfo> = map
        .regions()
        .iter()
        .map(|r| {
            let note = if r.rank == 0 {
                "collapses to a point".to_string()
            } else if r.rank == n {
                format!("{}-dimensional, leaves are points", r.rank)
            } else {
                format!("{}-dimensional, leaves of dimension {} collapsed", r.rank, n - r.rank)
            };
            RegionLeafInfo {
                label: r.label,
                rank: r.rank,
                cells: r.cells,
                physical_dimension: r.rank,
                leaf_dimension: n - r.rank,
                touches_boundary: map.touches_boundary(r.label),
                note,
            }
        })
        .collect();
    let rank_zero: Vec<&RegionLeafInfo> = regions.iter().filter(|r| r.rank == 0).collect();
    let positive: Vec<&RegionLeafInfo> = regions.iter().filter(|r| r.rank > 0).collect();

    let summary = if regions.is_empty() {
        "no admissible cells".to_string()
    } else if positive.is_empty() {
        if rank_zero.len() == 1 {
            "one region, collapses to a point".to_string()
        } else {
            format!("{} regions, each collapses to a point", rank_zero.len())
        }
    } else if n == 2
        && rank_zero.len() == 1
        && rank_zero[0].touches_boundary
        && positive.len() == 1
        && positive[0].rank == 2
    {
        "plane with one region pinched to a point ⇒ topological sphere".to_string()
    } else if rank_zero.is_empty() && positive.len() == 1 {
        let r = positive[0];
        if r.leaf_dimension == 0 {
            format!("one region, dimension {}", r.rank)
        } else {
            format!(
                "one region, dimension {} (leaves of dimension {} collapsed)",
                r.rank, r.leaf_dimension
            )
        }
    } else {
        let mut by_rank: Vec<usize> = positive.iter().map(|r| r.rank).collect();
        by_rank.sort_unstable();
        by_rank.dedup();
        let pieces: Vec<String> = by_rank
            .iter()
            .map(|&k| {
                let count = positive.iter().filter(|r| r.rank == k).count();
                format!("{count} region(s) of dimension {k}")
            })
            .collect();
        format!(
            "{}; {} rank-0 region(s) collapsed to points",
            pieces.join(", "),
            rank_zero.len()
        )
    };

    LeafSpaceReport {
        dimension: n,
        rank_zero_regions: rank_zero.len(),
        excluded_cells: map.excluded_cells(),
        regions,
        summary,
    }
}
