//! Executable regenerating-code engine.
//!
//! Distributes a file into n coded nodes, reconstructs from any k,
//! concurrently regenerates t failed nodes through a central engine, grows
//! (n,k) clusters to (n+s,k), and verifies the MDS / strong-MDS rank
//! properties that every one of those operations must preserve.
//!
//! Regeneration is functional: seeded random projections with
//! verify-and-retry. Over F_257 the singularity probability per attempt is
//! small, and the retry loop turns it into a deterministic-given-seed
//! outcome.

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::bounds::{frac, frac_int, CodeParams, Frac};
use crate::gf::PrimeField;
use crate::matrix::GfMatrix;

/// Attempts per randomized construction before reporting a probabilistic
/// failure.
pub const RETRY_BUDGET: usize = 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("invalid codec parameters: {0}")]
    InvalidParams(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("MDS construction failed after {attempts} attempts")]
    ConstructionFailure { attempts: usize },
    #[error(
        "randomized {operation} did not reach an MDS state within {attempts} attempts; \
         a larger field may be needed"
    )]
    ProbabilisticFailure {
        operation: &'static str,
        attempts: usize,
    },
    #[error("repair impossible: only {available} helpers available, need at least k={k}")]
    ImpossibleRepair { available: usize, k: usize },
    #[error("reconstruction failed: node subset {subset:?} stacks to rank {rank}, need {need}")]
    RankDeficient {
        subset: Vec<usize>,
        rank: usize,
        need: usize,
    },
    #[error("matrix error: {0}")]
    Matrix(#[from] crate::matrix::MatrixError),
}

/// One storage node: a generator matrix (B x alpha) and, when the cluster
/// carries data, alpha packets of length L.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedNode {
    pub id: usize,
    pub gen: GfMatrix,
    /// alpha x L; row j is packet x_{i,j} = M^T g_i^j.
    pub payload: Option<GfMatrix>,
}

/// The source file as a B x L matrix: B packets of L symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFile {
    pub m: GfMatrix,
}

impl SourceFile {
    pub fn random(b: usize, l: usize, field: PrimeField, seed: u64) -> Self {
        SourceFile {
            m: GfMatrix::random_with_seed(b, l, field, seed),
        }
    }
}

/// Per-helper packet counts for an upgrade or flexible reconstruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DownloadVector {
    pub counts: Vec<usize>,
}

impl DownloadVector {
    pub fn new(counts: Vec<usize>) -> Self {
        DownloadVector { counts }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Bandwidth accounting for one repair or upgrade. Only helper-to-engine
/// traffic counts toward gamma; engine-to-newcomer traffic is metered
/// separately.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandwidthReport {
    pub helper_to_engine: usize,
    pub engine_to_newcomers: usize,
    pub per_helper: Vec<usize>,
    pub links: usize,
    pub attempts: usize,
}

/// Result of an MDS rank sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MdsReport {
    pub pass: bool,
    /// Node ids of a rank-deficient k-subset, when one was found.
    pub witness: Option<Vec<usize>>,
    pub subsets_checked: usize,
    pub exhaustive: bool,
}

/// Exhaustive strong-MDS sweep over download vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrongMdsReport {
    pub total_vectors: usize,
    pub passed: usize,
    pub failures: Vec<DownloadVector>,
}

impl StrongMdsReport {
    pub fn pass_rate(&self) -> f64 {
        self.passed as f64 / self.total_vectors as f64
    }
}

/// MDS-check sampling policy: exhaustive up to `exhaustive_limit` k-subsets,
/// otherwise `sample_count` uniform samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MdsCheckConfig {
    pub exhaustive_limit: usize,
    pub sample_count: usize,
    pub sample_seed: u64,
}

impl Default for MdsCheckConfig {
    fn default() -> Self {
        MdsCheckConfig {
            exhaustive_limit: 100_000,
            sample_count: 10_000,
            sample_seed: 0,
        }
    }
}

/// An (n, k) coded cluster: node contents plus the code geometry.
#[derive(Debug, Clone)]
pub struct Cluster {
    pub field: PrimeField,
    /// File size in packets; always k * alpha.
    pub b: usize,
    pub k: usize,
    pub d: usize,
    pub t: usize,
    pub alpha: usize,
    pub nodes: Vec<CodedNode>,
    next_id: usize,
    pub mds_config: MdsCheckConfig,
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

impl Cluster {
    /// Distribute a file into n coded nodes. Requires B = k(d-k+t) so each
    /// node stores alpha = d-k+t packets. Generator matrices are drawn from
    /// the seed and redrawn until the cluster is MDS.
    pub fn distribute(
        file: &SourceFile,
        params: &CodeParams,
        field: PrimeField,
        seed: u64,
    ) -> Result<Cluster, CodecError> {
        let alpha = params.d - params.k + params.t;
        let b = params.k * alpha;
        if params.b != frac_int(b as i128) {
            return Err(CodecError::InvalidParams(format!(
                "file size must be B = k(d-k+t) = {b} packets, got {}",
                params.b
            )));
        }
        if file.m.rows() != b {
            return Err(CodecError::InvalidParams(format!(
                "source file has {} packets, expected B = {b}",
                file.m.rows()
            )));
        }
        if file.m.field() != field {
            return Err(CodecError::Usage("source file field mismatch".into()));
        }

        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut cluster = Cluster {
            field,
            b,
            k: params.k,
            d: params.d,
            t: params.t,
            alpha,
            nodes: Vec::new(),
            next_id: params.n,
            mds_config: MdsCheckConfig::default(),
        };
        for _attempt in 0..RETRY_BUDGET {
            cluster.nodes = (0..params.n)
                .map(|id| {
                    let gen = GfMatrix::random(b, alpha, field, &mut rng);
                    let payload = file.m.transpose().matmul(&gen).map(|p| p.transpose());
                    Ok(CodedNode {
                        id,
                        gen,
                        payload: Some(payload?),
                    })
                })
                .collect::<Result<_, CodecError>>()?;
            if cluster.check_mds().pass {
                return Ok(cluster);
            }
        }
        Err(CodecError::ConstructionFailure {
            attempts: RETRY_BUDGET,
        })
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: usize) -> Option<&CodedNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn node_ids(&self) -> Vec<usize> {
        self.nodes.iter().map(|n| n.id).collect()
    }

    /// Remove nodes (a failure event). Returns the removed nodes.
    pub fn remove_nodes(&mut self, ids: &[usize]) -> Result<Vec<CodedNode>, CodecError> {
        for &id in ids {
            if self.node(id).is_none() {
                return Err(CodecError::Usage(format!("node {id} does not exist")));
            }
        }
        let (gone, kept): (Vec<_>, Vec<_>) =
            std::mem::take(&mut self.nodes).into_iter().partition(|n| ids.contains(&n.id));
        self.nodes = kept;
        Ok(gone)
    }

    /// Recover the source file from exactly k nodes.
    pub fn reconstruct(&self, node_ids: &[usize]) -> Result<SourceFile, CodecError> {
        if node_ids.len() != self.k {
            return Err(CodecError::Usage(format!(
                "reconstruction needs exactly k = {} nodes, got {}",
                self.k,
                node_ids.len()
            )));
        }
        let nodes: Vec<&CodedNode> = node_ids
            .iter()
            .map(|&id| {
                self.node(id)
                    .ok_or_else(|| CodecError::Usage(format!("node {id} does not exist")))
            })
            .collect::<Result<_, _>>()?;

        let mut stacked = nodes[0].gen.clone();
        for node in &nodes[1..] {
            stacked = stacked.hstack(&node.gen)?;
        }
        let rank = stacked.rank();
        if rank < self.b {
            return Err(CodecError::RankDeficient {
                subset: node_ids.to_vec(),
                rank,
                need: self.b,
            });
        }

        // Stacked payloads satisfy Y = G_stack^T M, so M = (G_stack^T)^-1 Y.
        let mut payloads = Vec::new();
        for node in &nodes {
            let p = node.payload.as_ref().ok_or_else(|| {
                CodecError::Usage(format!("node {} carries no payload", node.id))
            })?;
            payloads.push(p.clone());
        }
        let mut y = payloads[0].clone();
        for p in &payloads[1..] {
            y = y.vstack(p)?;
        }
        let m = stacked.transpose().inverse()?.matmul(&y)?;
        Ok(SourceFile { m })
    }

    /// Concurrently regenerate `failed` (t nodes) from `helpers` (d nodes)
    /// through the engine. Each helper ships t random projections of its
    /// alpha packets; the engine recombines the d*t received packets into t
    /// replacement nodes and retries the projections until the cluster is
    /// MDS again.
    pub fn concurrent_repair(
        &mut self,
        failed: &[usize],
        helpers: &[usize],
        seed: u64,
    ) -> Result<BandwidthReport, CodecError> {
        if helpers.len() < self.k {
            return Err(CodecError::ImpossibleRepair {
                available: helpers.len(),
                k: self.k,
            });
        }
        if failed.len() != self.t {
            return Err(CodecError::Usage(format!(
                "concurrent repair regenerates exactly t = {} nodes, got {}",
                self.t,
                failed.len()
            )));
        }
        if helpers.len() != self.d {
            return Err(CodecError::Usage(format!(
                "concurrent repair uses exactly d = {} helpers, got {}",
                self.d,
                helpers.len()
            )));
        }
        if failed.iter().any(|id| helpers.contains(id)) {
            return Err(CodecError::Usage(
                "helper set must be disjoint from the failed set".into(),
            ));
        }
        let helper_nodes: Vec<CodedNode> = helpers
            .iter()
            .map(|&id| {
                self.node(id)
                    .cloned()
                    .ok_or_else(|| CodecError::Usage(format!("helper {id} is not alive")))
            })
            .collect::<Result<_, _>>()?;
        // Failed nodes leave the cluster; some may already be gone when the
        // failure itself was recorded earlier.
        let present: Vec<usize> = failed
            .iter()
            .copied()
            .filter(|&id| self.node(id).is_some())
            .collect();
        self.remove_nodes(&present)?;

        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let new_ids: Vec<usize> = (0..self.t).map(|i| self.next_id + i).collect();

        for attempt in 1..=RETRY_BUDGET {
            let mut collected_gen: Option<GfMatrix> = None;
            let mut collected_payload: Option<GfMatrix> = None;
            for helper in &helper_nodes {
                // alpha x t projection; the helper transmits t coded packets.
                let proj = GfMatrix::random(self.alpha, self.t, self.field, &mut rng);
                let gen_part = helper.gen.matmul(&proj)?;
                collected_gen = Some(match collected_gen {
                    Some(acc) => acc.hstack(&gen_part)?,
                    None => gen_part,
                });
                if let Some(p) = &helper.payload {
                    let sent = proj.transpose().matmul(p)?; // t x L
                    collected_payload = Some(match collected_payload {
                        Some(acc) => acc.vstack(&sent)?,
                        None => sent,
                    });
                }
            }
            let collected_gen = collected_gen.expect("d >= 1 helpers");

            let mut newcomers = Vec::with_capacity(self.t);
            for &id in &new_ids {
                // dt x alpha recombination for this newcomer.
                let z = GfMatrix::random(self.d * self.t, self.alpha, self.field, &mut rng);
                let gen = collected_gen.matmul(&z)?;
                let payload = collected_payload
                    .as_ref()
                    .map(|c| z.transpose().matmul(c))
                    .transpose()?;
                newcomers.push(CodedNode { id, gen, payload });
            }

            self.nodes.extend(newcomers);
            if self.check_mds().pass {
                self.next_id += self.t;
                return Ok(BandwidthReport {
                    helper_to_engine: self.d * self.t,
                    engine_to_newcomers: self.t * self.alpha,
                    per_helper: vec![self.t; self.d],
                    links: self.d,
                    attempts: attempt,
                });
            }
            self.nodes.truncate(self.nodes.len() - self.t);
        }
        Err(CodecError::ProbabilisticFailure {
            operation: "concurrent repair",
            attempts: RETRY_BUDGET,
        })
    }

    /// Grow the cluster from (n, k) to (n+s, k). Helper i ships h_i coded
    /// packets; the engine recombines them into s added nodes. The MDS check
    /// covers the whole grown cluster, non-helpers included.
    pub fn upgrade(
        &mut self,
        s: usize,
        d_s: usize,
        h: &DownloadVector,
        seed: u64,
    ) -> Result<BandwidthReport, CodecError> {
        let n = self.n();
        if s < 1 {
            return Err(CodecError::Usage("upgrade needs s >= 1".into()));
        }
        if !(self.k <= d_s && d_s <= n) {
            return Err(CodecError::Usage(format!(
                "need k <= d_s <= n, got k={}, d_s={d_s}, n={n}",
                self.k
            )));
        }
        if h.counts.len() != d_s {
            return Err(CodecError::Usage(format!(
                "download vector has {} entries, expected d_s = {d_s}",
                h.counts.len()
            )));
        }
        if h.counts.iter().any(|&hi| hi == 0 || hi > s) {
            return Err(CodecError::Usage(format!(
                "download vector entries must satisfy 0 < h_i <= s = {s}, got {:?}",
                h.counts
            )));
        }
        let required = min_upgrade_total(self.b, self.k, d_s, s)?;
        if h.total() != required {
            return Err(CodecError::Usage(format!(
                "download vector totals {} packets, the minimum for s={s}, d_s={d_s} is {required}",
                h.total()
            )));
        }

        let helper_nodes: Vec<CodedNode> = self.nodes[..d_s].to_vec();
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let new_ids: Vec<usize> = (0..s).map(|i| self.next_id + i).collect();

        for attempt in 1..=RETRY_BUDGET {
            let mut collected_gen: Option<GfMatrix> = None;
            let mut collected_payload: Option<GfMatrix> = None;
            for (helper, &hi) in helper_nodes.iter().zip(&h.counts) {
                let proj = GfMatrix::random(self.alpha, hi, self.field, &mut rng);
                let gen_part = helper.gen.matmul(&proj)?;
                collected_gen = Some(match collected_gen {
                    Some(acc) => acc.hstack(&gen_part)?,
                    None => gen_part,
                });
                if let Some(p) = &helper.payload {
                    let sent = proj.transpose().matmul(p)?;
                    collected_payload = Some(match collected_payload {
                        Some(acc) => acc.vstack(&sent)?,
                        None => sent,
                    });
                }
            }
            let collected_gen = collected_gen.expect("d_s >= 1 helpers");

            let mut added = Vec::with_capacity(s);
            for &id in &new_ids {
                let z = GfMatrix::random(h.total(), self.alpha, self.field, &mut rng);
                let gen = collected_gen.matmul(&z)?;
                let payload = collected_payload
                    .as_ref()
                    .map(|c| z.transpose().matmul(c))
                    .transpose()?;
                added.push(CodedNode { id, gen, payload });
            }

            self.nodes.extend(added);
            if self.check_mds().pass {
                self.next_id += s;
                return Ok(BandwidthReport {
                    helper_to_engine: h.total(),
                    engine_to_newcomers: s * self.alpha,
                    per_helper: h.counts.clone(),
                    links: d_s,
                    attempts: attempt,
                });
            }
            self.nodes.truncate(self.nodes.len() - s);
        }
        Err(CodecError::ProbabilisticFailure {
            operation: "upgrade",
            attempts: RETRY_BUDGET,
        })
    }

    /// Verify that every k-subset of generator matrices stacks to full rank
    /// k * alpha. Exhaustive up to the configured subset limit, sampled
    /// beyond it.
    pub fn check_mds(&self) -> MdsReport {
        let n = self.n();
        if n < self.k {
            return MdsReport {
                pass: false,
                witness: Some(self.node_ids()),
                subsets_checked: 0,
                exhaustive: true,
            };
        }
        let need = self.k * self.alpha;
        let total = binomial(n, self.k);
        let exhaustive = total <= self.mds_config.exhaustive_limit;

        let check_subset = |subset: &[usize]| -> bool {
            let mut stacked = self.nodes[subset[0]].gen.clone();
            for &idx in &subset[1..] {
                stacked = stacked
                    .hstack(&self.nodes[idx].gen)
                    .expect("nodes share shape and field");
            }
            stacked.rank() == need
        };

        let mut checked = 0;
        if exhaustive {
            for subset in (0..n).combinations(self.k) {
                checked += 1;
                if !check_subset(&subset) {
                    return MdsReport {
                        pass: false,
                        witness: Some(subset.iter().map(|&i| self.nodes[i].id).collect()),
                        subsets_checked: checked,
                        exhaustive,
                    };
                }
            }
        } else {
            let mut rng = ChaCha12Rng::seed_from_u64(self.mds_config.sample_seed);
            for _ in 0..self.mds_config.sample_count {
                let subset = rand::seq::index::sample(&mut rng, n, self.k).into_vec();
                checked += 1;
                if !check_subset(&subset) {
                    return MdsReport {
                        pass: false,
                        witness: Some(subset.iter().map(|&i| self.nodes[i].id).collect()),
                        subsets_checked: checked,
                        exhaustive,
                    };
                }
            }
        }
        MdsReport {
            pass: true,
            witness: None,
            subsets_checked: checked,
            exhaustive,
        }
    }

    /// Strong-MDS check for one download vector: taking h_i packet-level
    /// generator columns from node i must stack to rank B. Requires the
    /// strong-MDS granularity alpha = n - k.
    pub fn check_strong_mds(&self, downloads: &DownloadVector) -> Result<bool, CodecError> {
        let n = self.n();
        if self.alpha != n - self.k {
            return Err(CodecError::Usage(format!(
                "strong-MDS granularity needs alpha = n - k = {}, cluster has alpha = {}",
                n - self.k,
                self.alpha
            )));
        }
        if downloads.counts.len() != n {
            return Err(CodecError::Usage(format!(
                "download vector has {} entries, expected n = {n}",
                downloads.counts.len()
            )));
        }
        if downloads.counts.iter().any(|&hi| hi > self.alpha) {
            return Err(CodecError::Usage(format!(
                "download vector entries must be at most alpha = {}",
                self.alpha
            )));
        }
        if downloads.total() != self.b {
            return Err(CodecError::Usage(format!(
                "download vector totals {}, must equal B = {}",
                downloads.total(),
                self.b
            )));
        }
        let mut stacked: Option<GfMatrix> = None;
        for (node, &hi) in self.nodes.iter().zip(&downloads.counts) {
            if hi == 0 {
                continue;
            }
            let cols: Vec<usize> = (0..hi).collect();
            let part = node.gen.select_columns(&cols);
            stacked = Some(match stacked {
                Some(acc) => acc.hstack(&part)?,
                None => part,
            });
        }
        let stacked = stacked.ok_or_else(|| CodecError::Usage("empty download vector".into()))?;
        Ok(stacked.rank() == self.b)
    }

    /// Iterate every download vector with sum B and entries in [0, alpha]
    /// and report how many reach full rank. Guarded to n <= 8 where the
    /// vector count stays small.
    pub fn strong_mds_exhaustive(&self) -> Result<StrongMdsReport, CodecError> {
        let n = self.n();
        if n > 8 {
            return Err(CodecError::Usage(format!(
                "exhaustive strong-MDS sweep is limited to n <= 8, cluster has n = {n}"
            )));
        }
        let mut report = StrongMdsReport {
            total_vectors: 0,
            passed: 0,
            failures: Vec::new(),
        };
        let mut counts = vec![0usize; n];
        self.sweep_vectors(&mut counts, 0, self.b, &mut report)?;
        Ok(report)
    }

    fn sweep_vectors(
        &self,
        counts: &mut Vec<usize>,
        idx: usize,
        remaining: usize,
        report: &mut StrongMdsReport,
    ) -> Result<(), CodecError> {
        let n = counts.len();
        if idx == n {
            if remaining != 0 {
                return Ok(());
            }
            report.total_vectors += 1;
            let v = DownloadVector::new(counts.clone());
            if self.check_strong_mds(&v)? {
                report.passed += 1;
            } else {
                report.failures.push(v);
            }
            return Ok(());
        }
        // prune: the rest can absorb at most (n - idx - 1) * alpha
        for hi in 0..=self.alpha.min(remaining) {
            if remaining - hi > (n - idx - 1) * self.alpha {
                continue;
            }
            counts[idx] = hi;
            self.sweep_vectors(counts, idx + 1, remaining - hi, report)?;
        }
        counts[idx] = 0;
        Ok(())
    }
}

/// Minimum total upgrade download for s new nodes from d_s helpers,
/// s(d_s - s + 1) B / (k (d_s - k + 1)), in whole packets.
pub fn min_upgrade_total(b: usize, k: usize, d_s: usize, s: usize) -> Result<usize, CodecError> {
    let total = frac(
        (s * (d_s - s + 1) * b) as i128,
        (k * (d_s - k + 1)) as i128,
    );
    if !total.is_integer() {
        return Err(CodecError::Usage(format!(
            "minimum upgrade download {} is not a whole number of packets",
            crate::bounds::fmt_frac(&total)
        )));
    }
    Ok(*total.numer() as usize)
}

/// Minimum per-helper and total bandwidth to generate r newcomers:
/// beta >= r B / (k (d - k + r)) per helper, and for a fixed helper count d
/// the total is B r (d - r + 1) / (k (d - k + 1)).
pub fn min_upgrade_bandwidth(b: Frac, k: usize, d: usize, r: usize) -> (Frac, Frac) {
    let per_helper = &b * frac(r as i128, (k * (d - k + r)) as i128);
    let total = &b * frac((r * (d - r + 1)) as i128, (k * (d - k + 1)) as i128);
    (per_helper, total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::ms_point;
    use num_traits::One;

    fn f257() -> PrimeField {
        PrimeField::new(257).unwrap()
    }

    fn example3_cluster(seed: u64) -> (Cluster, SourceFile) {
        let field = f257();
        let params = CodeParams::new(frac_int(12), 7, 4, 5, 2).unwrap();
        let file = SourceFile::random(12, 1, field, seed ^ 0xF11E);
        let cluster = Cluster::distribute(&file, &params, field, seed).unwrap();
        (cluster, file)
    }

    #[test]
    fn distribute_example3_shape() {
        let (cluster, _) = example3_cluster(1);
        assert_eq!(cluster.n(), 7);
        assert_eq!(cluster.alpha, 3);
        assert_eq!(cluster.b, 12);
        for node in &cluster.nodes {
            assert_eq!(node.gen.rows(), 12);
            assert_eq!(node.gen.cols(), 3);
            assert_eq!(node.payload.as_ref().unwrap().rows(), 3);
        }
    }

    #[test]
    fn distribute_is_deterministic() {
        let (a, _) = example3_cluster(7);
        let (b, _) = example3_cluster(7);
        for (x, y) in a.nodes.iter().zip(&b.nodes) {
            assert_eq!(x.gen, y.gen);
        }
    }

    #[test]
    fn distribute_rejects_wrong_file_size() {
        let field = f257();
        let params = CodeParams::new(frac_int(11), 7, 4, 5, 2).unwrap();
        let file = SourceFile::random(11, 1, field, 0);
        assert!(matches!(
            Cluster::distribute(&file, &params, field, 0),
            Err(CodecError::InvalidParams(_))
        ));
    }

    #[test]
    fn parity_style_code() {
        // k = n-1, t = 1, d = k: alpha = 1, B = k; any n-1 nodes reconstruct.
        let field = f257();
        let params = CodeParams::new(frac_int(4), 5, 4, 4, 1).unwrap();
        let file = SourceFile::random(4, 2, field, 3);
        let cluster = Cluster::distribute(&file, &params, field, 3).unwrap();
        for subset in (0..5usize).combinations(4) {
            let got = cluster.reconstruct(&subset).unwrap();
            assert_eq!(got.m, file.m);
        }
    }

    #[test]
    fn reconstruct_round_trip_all_subsets() {
        let (cluster, file) = example3_cluster(11);
        for subset in cluster.node_ids().into_iter().combinations(4) {
            let got = cluster.reconstruct(&subset).unwrap();
            assert_eq!(got.m, file.m);
        }
    }

    #[test]
    fn reconstruct_insufficient_nodes() {
        let (cluster, _) = example3_cluster(2);
        assert!(matches!(
            cluster.reconstruct(&[0, 1, 2]),
            Err(CodecError::Usage(_))
        ));
    }

    #[test]
    fn reconstruct_reports_deficient_subset() {
        let (mut cluster, _) = example3_cluster(4);
        // duplicate node 0's generator into node 1: the pair is deficient
        cluster.nodes[1].gen = cluster.nodes[0].gen.clone();
        cluster.nodes[1].payload = cluster.nodes[0].payload.clone();
        match cluster.reconstruct(&[0, 1, 2, 3]) {
            Err(CodecError::RankDeficient { subset, rank, need }) => {
                assert_eq!(subset, vec![0, 1, 2, 3]);
                assert!(rank < need);
            }
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn repair_example3_bandwidth() {
        let (mut cluster, file) = example3_cluster(21);
        let report = cluster
            .concurrent_repair(&[1, 2], &[0, 3, 4, 5, 6], 22)
            .unwrap();
        assert_eq!(report.helper_to_engine, 10); // 2 packets from each of 5 helpers
        assert_eq!(report.per_helper, vec![2; 5]);
        assert_eq!(report.links, 5);
        // matches the minimum-storage gamma in packet units
        let params = CodeParams::new(frac_int(12), 7, 4, 5, 2).unwrap();
        assert_eq!(frac_int(report.helper_to_engine as i128), ms_point(&params).gamma);

        // post-repair: every 4-subset still reconstructs the original file
        for subset in cluster.node_ids().into_iter().combinations(4) {
            assert_eq!(cluster.reconstruct(&subset).unwrap().m, file.m);
        }
    }

    #[test]
    fn repair_whole_file_boundary() {
        // t = 1, d = k: the engine downloads the whole file.
        let field = f257();
        let params = CodeParams::new(frac_int(3), 5, 3, 3, 1).unwrap();
        let file = SourceFile::random(3, 1, field, 5);
        let mut cluster = Cluster::distribute(&file, &params, field, 5).unwrap();
        let report = cluster.concurrent_repair(&[0], &[1, 2, 3], 6).unwrap();
        assert_eq!(report.helper_to_engine, 3); // = B
    }

    #[test]
    fn repair_errors() {
        let (mut cluster, _) = example3_cluster(31);
        assert!(matches!(
            cluster.concurrent_repair(&[1, 2], &[0, 3, 4], 0),
            Err(CodecError::ImpossibleRepair { available: 3, k: 4 })
        ));
        assert!(matches!(
            cluster.concurrent_repair(&[1, 2], &[0, 2, 3, 4, 5], 0),
            Err(CodecError::Usage(_))
        ));
        assert!(matches!(
            cluster.concurrent_repair(&[1], &[0, 2, 3, 4, 5], 0),
            Err(CodecError::Usage(_))
        ));
    }

    #[test]
    fn repair_is_deterministic() {
        let run = |seed| {
            let (mut cluster, _) = example3_cluster(9);
            cluster.concurrent_repair(&[0, 1], &[2, 3, 4, 5, 6], seed).unwrap();
            cluster
                .nodes
                .iter()
                .map(|n| n.gen.clone())
                .collect::<Vec<_>>()
        };
        assert_eq!(run(17), run(17));
        assert_ne!(run(17), run(18));
    }

    #[test]
    fn upgrade_example3() {
        let (mut cluster, file) = example3_cluster(41);
        // (7,4) -> (8,4) with d_s = 6: 6 packets
        let report = cluster
            .upgrade(1, 6, &DownloadVector::new(vec![1; 6]), 42)
            .unwrap();
        assert_eq!(report.helper_to_engine, 6);
        assert_eq!(cluster.n(), 8);
        // (8,4) -> (10,4) with d_s = 6: 10 packets, h = [2,2,2,2,1,1]
        let report = cluster
            .upgrade(2, 6, &DownloadVector::new(vec![2, 2, 2, 2, 1, 1]), 43)
            .unwrap();
        assert_eq!(report.helper_to_engine, 10);
        assert_eq!(cluster.n(), 10);
        // the grown cluster is MDS including the non-helpers
        for subset in cluster.node_ids().into_iter().combinations(4) {
            assert_eq!(cluster.reconstruct(&subset).unwrap().m, file.m);
        }
    }

    #[test]
    fn upgrade_validates_download_vector() {
        let (mut cluster, _) = example3_cluster(51);
        // wrong total
        assert!(matches!(
            cluster.upgrade(1, 6, &DownloadVector::new(vec![1, 1, 1, 1, 1, 2]), 0),
            Err(CodecError::Usage(_))
        ));
        // entry above the cap s
        assert!(matches!(
            cluster.upgrade(1, 6, &DownloadVector::new(vec![2, 1, 1, 1, 1, 0]), 0),
            Err(CodecError::Usage(_))
        ));
        // d_s out of range
        assert!(matches!(
            cluster.upgrade(1, 8, &DownloadVector::new(vec![1; 8]), 0),
            Err(CodecError::Usage(_))
        ));
    }

    #[test]
    fn upgrade_download_vector_permutations() {
        // For a fixed total, every valid permutation of h succeeds.
        let perms: Vec<Vec<usize>> = vec![
            vec![2, 2, 2, 2, 1, 1],
            vec![1, 1, 2, 2, 2, 2],
            vec![2, 1, 2, 1, 2, 2],
            vec![1, 2, 2, 2, 2, 1],
        ];
        for (i, h) in perms.into_iter().enumerate() {
            let (mut cluster, _) = example3_cluster(61 + i as u64);
            let report = cluster
                .upgrade(2, 6, &DownloadVector::new(h.clone()), 100 + i as u64)
                .unwrap();
            assert_eq!(report.per_helper, h);
            assert!(cluster.check_mds().pass);
        }
    }

    #[test]
    fn min_upgrade_bandwidth_values() {
        // normalized B = k(d-k+1): total = r(d-r+1)
        let (_, total) = min_upgrade_bandwidth(frac_int(8), 4, 5, 2);
        assert_eq!(total, frac_int(8));
        // B = 12 scenario: 2 packets per helper
        let (per, _) = min_upgrade_bandwidth(frac_int(12), 4, 5, 2);
        assert_eq!(per, frac_int(2));
        // r = 1 degenerates to the single-repair MSR per-helper bandwidth
        let (per, _) = min_upgrade_bandwidth(frac_int(12), 4, 6, 1);
        assert_eq!(per, frac_int(12) / frac_int((4 * 3) as i128));
        // r = k, d = k: whole-file regeneration
        let (per, total) = min_upgrade_bandwidth(frac_int(12), 4, 4, 4);
        assert_eq!(per, frac_int(3));
        assert_eq!(total, frac_int(12));
    }

    #[test]
    fn check_mds_witness() {
        let (mut cluster, _) = example3_cluster(71);
        assert!(cluster.check_mds().pass);
        cluster.nodes[2].gen = cluster.nodes[5].gen.clone();
        let report = cluster.check_mds();
        assert!(!report.pass);
        let witness = report.witness.unwrap();
        assert!(witness.contains(&2) && witness.contains(&5));
    }

    #[test]
    fn strong_mds_classic_case() {
        // alpha = n - k cluster: downloading alpha packets from k nodes is
        // the plain MDS case.
        let field = f257();
        let params = CodeParams::new(frac_int(9), 6, 3, 3, 3).unwrap();
        let file = SourceFile::random(9, 1, field, 80);
        let cluster = Cluster::distribute(&file, &params, field, 81).unwrap();
        let h = DownloadVector::new(vec![3, 3, 3, 0, 0, 0]);
        assert!(cluster.check_strong_mds(&h).unwrap());
        // short one packet: must fail the sum precondition
        let short = DownloadVector::new(vec![3, 3, 2, 0, 0, 0]);
        assert!(matches!(
            cluster.check_strong_mds(&short),
            Err(CodecError::Usage(_))
        ));
    }

    #[test]
    fn strong_mds_after_regenerating_k_nodes() {
        let field = f257();
        let params = CodeParams::new(frac_int(9), 6, 3, 3, 3).unwrap();
        let file = SourceFile::random(9, 1, field, 90);
        let mut cluster = Cluster::distribute(&file, &params, field, 91).unwrap();
        let report = cluster.concurrent_repair(&[0, 1, 2], &[3, 4, 5], 92).unwrap();
        assert_eq!(report.helper_to_engine, 9); // = B for t = k
        let sweep = cluster.strong_mds_exhaustive().unwrap();
        assert_eq!(sweep.total_vectors, 580);
        assert!(sweep.pass_rate() >= 0.99, "pass rate {}", sweep.pass_rate());
    }

    #[test]
    fn min_upgrade_total_rejects_fractional() {
        assert_eq!(min_upgrade_total(12, 4, 6, 1).unwrap(), 6);
        assert_eq!(min_upgrade_total(12, 4, 6, 2).unwrap(), 10);
        // B = 12, k = 4, d_s = 7, s = 2: 2*6*12 / (4*4) = 9
        assert_eq!(min_upgrade_total(12, 4, 7, 2).unwrap(), 9);
    }
}
