//! Net preprocessing: decide which pin groups of each net talk optically.
//!
//! Pins of a net are clustered by single-linkage agglomeration under
//! Manhattan distance and the dendrogram is cut at the critical length, so
//! any two surviving clusters are at least that far apart. Each cluster
//! collapses to a pseudo-pin at its coordinate-wise median; the cluster
//! holding the electrical driver drives one optical link per sink cluster.
//! Intra-cluster traffic stays electrical, as do nets that end up with a
//! single cluster.

use crate::geom::Point;
use crate::ingest::Netlist;
use crate::par;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PreprocessError {
    #[error("critical length must be > 0, got {0}")]
    BadCriticalLength(f64),
}

/// One agglomeration: tree nodes `a` and `b` joined at `height`.
/// Leaves are 0..n-1; the k-th merge creates node n+k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeStep {
    pub a: usize,
    pub b: usize,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub n_leaves: usize,
    /// Heights are non-decreasing: single linkage is monotone.
    pub steps: Vec<MergeStep>,
}

/// Single-linkage agglomerative clustering under Manhattan distance.
///
/// Merge order is deterministic: among minimum-distance cluster pairs the
/// pair whose smallest member pin indices are lexicographically least wins.
pub fn cluster_dendrogram(pins: &[Point]) -> Dendrogram {
    let n = pins.len();
    let mut steps = Vec::with_capacity(n.saturating_sub(1));
    if n <= 1 {
        return Dendrogram { n_leaves: n, steps };
    }

    // Active clusters: node id, smallest member pin index.
    let mut node: Vec<usize> = (0..n).collect();
    let mut rep: Vec<usize> = (0..n).collect();
    let mut alive: Vec<bool> = vec![true; n];
    // Single-linkage distance matrix over cluster slots (Lance-Williams:
    // d(A+B, C) = min(d(A,C), d(B,C))).
    let mut dist = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = pins[i].manhattan(&pins[j]);
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }

    for k in 0..(n - 1) {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for i in 0..n {
            if !alive[i] {
                continue;
            }
            for j in (i + 1)..n {
                if !alive[j] {
                    continue;
                }
                let lo = rep[i].min(rep[j]);
                let hi = rep[i].max(rep[j]);
                let cand = (dist[i][j], lo, hi, i, j);
                let better = match &best {
                    None => true,
                    Some((bd, bl, bh, _, _)) => {
                        (cand.0, cand.1, cand.2) < (*bd, *bl, *bh)
                    }
                };
                if better {
                    best = Some(cand);
                }
            }
        }
        let (d, _, _, i, j) = best.expect("at least two clusters alive");
        steps.push(MergeStep { a: node[i], b: node[j], height: d });
        // Slot i becomes the merged cluster, slot j dies.
        node[i] = n + k;
        rep[i] = rep[i].min(rep[j]);
        alive[j] = false;
        for c in 0..n {
            if alive[c] && c != i {
                let m = dist[i][c].min(dist[j][c]);
                dist[i][c] = m;
                dist[c][i] = m;
            }
        }
    }

    debug_assert!(steps.windows(2).all(|w| w[0].height <= w[1].height));
    Dendrogram { n_leaves: n, steps }
}

/// Flat cut: apply every merge strictly below `l_crit`. Returned clusters
/// have sorted members and are ordered by smallest member.
pub fn extract_clusters(d: &Dendrogram, l_crit: f64) -> Vec<Vec<usize>> {
    let n = d.n_leaves;
    let mut parent: Vec<usize> = (0..n + d.steps.len()).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (k, s) in d.steps.iter().enumerate() {
        if s.height < l_crit {
            let top = n + k;
            let ra = find(&mut parent, s.a);
            let rb = find(&mut parent, s.b);
            parent[ra] = top;
            parent[rb] = top;
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for leaf in 0..n {
        let root = find(&mut parent, leaf);
        groups.entry(root).or_default().push(leaf);
    }
    let mut clusters: Vec<Vec<usize>> = groups.into_values().collect();
    for c in &mut clusters {
        c.sort_unstable();
    }
    clusters.sort_by_key(|c| c[0]);
    clusters
}

/// Coordinate-wise median; even counts take the lower of the two middle
/// values on each axis independently.
pub fn geometric_median(points: &[Point]) -> Point {
    assert!(!points.is_empty(), "median of an empty point set");
    let mut xs: Vec<f64> = points.iter().map(|p| p.x).collect();
    let mut ys: Vec<f64> = points.iter().map(|p| p.y).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    ys.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    let k = (points.len() - 1) / 2;
    Point::new(xs[k], ys[k])
}

/// A pin cluster collapsed to a pseudo-pin.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    /// Pin indices into the owning net, sorted.
    pub pins: Vec<usize>,
    pub median: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpticalNet {
    pub net_id: u32,
    /// Index of the cluster containing the electrical driver pin.
    pub driver_cluster: usize,
    pub clusters: Vec<Cluster>,
}

/// One driver-to-sink optical connection between cluster medians.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub id: usize,
    /// Index into `OpticalNetlist::nets`.
    pub net_index: usize,
    pub net_id: u32,
    pub driver_pos: Point,
    pub sink_pos: Point,
    /// Manhattan distance between the endpoints, mm.
    pub hpwl: f64,
    pub sink_cluster: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OpticalNetlist {
    pub nets: Vec<OpticalNet>,
    pub links: Vec<Link>,
}

impl OpticalNetlist {
    pub fn links_of_net(&self, net_index: usize) -> impl Iterator<Item = &Link> {
        self.links.iter().filter(move |l| l.net_index == net_index)
    }

    /// Largest pseudo-pin count over the optical nets (>= 2 when non-empty).
    pub fn pinmax(&self) -> usize {
        self.nets.iter().map(|n| n.clusters.len()).max().unwrap_or(0)
    }
}

/// Cluster every net and emit the optical netlist plus the ids of nets that
/// stay fully electrical.
///
/// After the dendrogram cut the cluster *medians* of a net can still sit
/// closer than `l_crit` even though the point sets are far apart (a ring of
/// pins has its median at the ring center). Clusters whose medians violate
/// the spacing are merged until every remaining pair is at least `l_crit`
/// apart, which keeps links-per-net = clusters - 1 and guarantees
/// `hpwl >= l_crit` for every link.
pub fn build_optical_netlist(
    netlist: &Netlist,
    l_crit: f64,
) -> Result<(OpticalNetlist, Vec<u32>), PreprocessError> {
    if !(l_crit > 0.0) || !l_crit.is_finite() {
        return Err(PreprocessError::BadCriticalLength(l_crit));
    }

    let per_net: Vec<Vec<Cluster>> = par::map_collect(&netlist.nets, |net| {
        let dendro = cluster_dendrogram(&net.pins);
        let mut clusters: Vec<Cluster> = extract_clusters(&dendro, l_crit)
            .into_iter()
            .map(|pins| {
                let pts: Vec<Point> = pins.iter().map(|&i| net.pins[i]).collect();
                Cluster { median: geometric_median(&pts), pins }
            })
            .collect();
        merge_close_medians(&mut clusters, net, l_crit);
        clusters
    });

    let mut onet = OpticalNetlist::default();
    let mut residual = Vec::new();
    let mut link_id = 0usize;
    for (net, clusters) in netlist.nets.iter().zip(per_net) {
        if clusters.len() < 2 {
            residual.push(net.id);
            continue;
        }
        let driver_cluster = clusters
            .iter()
            .position(|c| c.pins.contains(&net.driver))
            .expect("driver pin belongs to exactly one cluster");
        let net_index = onet.nets.len();
        let driver_pos = clusters[driver_cluster].median;
        for (ci, c) in clusters.iter().enumerate() {
            if ci == driver_cluster {
                continue;
            }
            onet.links.push(Link {
                id: link_id,
                net_index,
                net_id: net.id,
                driver_pos,
                sink_pos: c.median,
                hpwl: driver_pos.manhattan(&c.median),
                sink_cluster: ci,
            });
            link_id += 1;
        }
        onet.nets.push(OpticalNet { net_id: net.id, driver_cluster, clusters });
    }
    Ok((onet, residual))
}

fn merge_close_medians(clusters: &mut Vec<Cluster>, net: &crate::ingest::Net, l_crit: f64) {
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..clusters.len() {
            for j in (i + 1)..clusters.len() {
                let d = clusters[i].median.manhattan(&clusters[j].median);
                if d < l_crit {
                    let cand = (d, i, j);
                    if best.map_or(true, |b| (cand.0, cand.1, cand.2) < b) {
                        best = Some(cand);
                    }
                }
            }
        }
        let Some((_, i, j)) = best else { break };
        let absorbed = clusters.remove(j);
        clusters[i].pins.extend(absorbed.pins);
        clusters[i].pins.sort_unstable();
        let pts: Vec<Point> = clusters[i].pins.iter().map(|&p| net.pins[p]).collect();
        clusters[i].median = geometric_median(&pts);
        clusters.sort_by_key(|c| c.pins[0]);
    }
}
