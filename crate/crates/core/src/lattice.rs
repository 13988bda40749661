//! Domain types shared by every engine: chain parameters, spike-train cells,
//! the impulse-response kernel, k-grids, and the band-structure container.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Slack added to the `[alpha - 2|beta|, alpha + 2|beta|]` bound when
/// validating band energies, to absorb eigensolver noise.
const ENERGY_BOUND_SLACK: f64 = 1e-9;

/// Empirical parameters of the nearest-neighbor chain: on-site energy
/// `alpha` and hopping `beta` in eV, lattice constant `a` in lattice units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeParams {
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
}

impl LatticeParams {
    pub fn new(alpha: f64, beta: f64, a: f64) -> Result<Self> {
        let p = Self { alpha, beta, a };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() {
            return Err(Error::InvalidArgument("alpha must be finite".into()));
        }
        if !self.beta.is_finite() {
            return Err(Error::InvalidArgument("beta must be finite".into()));
        }
        if !self.a.is_finite() || self.a <= 0.0 {
            return Err(Error::InvalidArgument(
                "lattice constant a must be finite and > 0".into(),
            ));
        }
        Ok(())
    }

    /// Extremal band energies `(alpha - 2|beta|, alpha + 2|beta|)`; the full
    /// bandwidth is `4|beta|`.
    pub fn energy_bounds(&self) -> (f64, f64) {
        let half_width = 2.0 * self.beta.abs();
        (self.alpha - half_width, self.alpha + half_width)
    }
}

/// One weighted delta sitting on a lattice site.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spike {
    /// Site offset in integer multiples of the lattice constant.
    pub position: i64,
    pub weight: f64,
}

/// A cell written as a finite train of weighted deltas, ordered by strictly
/// increasing position. This is the "input signal" every engine starts from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Spike>", into = "Vec<Spike>")]
pub struct SpikeTrain {
    spikes: Vec<Spike>,
}

impl SpikeTrain {
    pub fn new(spikes: Vec<Spike>) -> Result<Self> {
        if spikes.is_empty() {
            return Err(Error::InvalidArgument("spike train must be nonempty".into()));
        }
        for pair in spikes.windows(2) {
            if pair[1].position <= pair[0].position {
                return Err(Error::InvalidArgument(
                    "spike positions must be strictly increasing".into(),
                ));
            }
        }
        if spikes.iter().any(|s| !s.weight.is_finite()) {
            return Err(Error::InvalidArgument("spike weights must be finite".into()));
        }
        Ok(Self { spikes })
    }

    /// Unit-weight spikes at the given (strictly increasing) positions.
    pub fn unit(positions: &[i64]) -> Result<Self> {
        Self::new(
            positions
                .iter()
                .map(|&position| Spike { position, weight: 1.0 })
                .collect(),
        )
    }

    pub fn spikes(&self) -> &[Spike] {
        &self.spikes
    }

    pub fn len(&self) -> usize {
        self.spikes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spikes.is_empty()
    }
}

impl TryFrom<Vec<Spike>> for SpikeTrain {
    type Error = Error;

    fn try_from(spikes: Vec<Spike>) -> Result<Self> {
        Self::new(spikes)
    }
}

impl From<SpikeTrain> for Vec<Spike> {
    fn from(train: SpikeTrain) -> Self {
        train.spikes
    }
}

/// The canonical `m`-site cell: unit-weight spikes on the contiguous integer
/// range `[-floor((m-1)/2), ceil((m-1)/2)]`. The origin is always occupied
/// and the positive side is at least as long as the negative one.
pub fn canonical_cell(m: usize) -> Result<SpikeTrain> {
    if m == 0 {
        return Err(Error::InvalidArgument("cell size must be at least 1".into()));
    }
    let m = m as i64;
    let lo = -((m - 1) / 2);
    let hi = m / 2;
    SpikeTrain::unit(&(lo..=hi).collect::<Vec<_>>())
}

/// An odd-length response kernel centered on offset 0; tap values are
/// energies in eV. Taps must be mirror-symmetric exactly: that symmetry is
/// what makes convolution and correlation with the kernel interchangeable,
/// so it is enforced bit-for-bit at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ImpulseResponse {
    taps: Vec<f64>,
}

impl ImpulseResponse {
    pub fn new(taps: Vec<f64>) -> Result<Self> {
        if taps.is_empty() || taps.len() % 2 == 0 {
            return Err(Error::InvalidArgument(
                "kernel must have odd, nonzero length".into(),
            ));
        }
        if taps.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument("kernel taps must be finite".into()));
        }
        let n = taps.len();
        for i in 0..n / 2 {
            if taps[i] != taps[n - 1 - i] {
                return Err(Error::InvalidArgument(
                    "kernel taps must be symmetric about the center".into(),
                ));
            }
        }
        Ok(Self { taps })
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// Number of taps on each side of the center.
    pub fn half_width(&self) -> i64 {
        (self.taps.len() / 2) as i64
    }

    /// Tap value at a signed offset; zero outside the kernel support.
    pub fn tap_at(&self, offset: i64) -> f64 {
        let r = self.half_width();
        if offset < -r || offset > r {
            0.0
        } else {
            self.taps[(offset + r) as usize]
        }
    }
}

impl TryFrom<Vec<f64>> for ImpulseResponse {
    type Error = Error;

    fn try_from(taps: Vec<f64>) -> Result<Self> {
        Self::new(taps)
    }
}

impl From<ImpulseResponse> for Vec<f64> {
    fn from(kernel: ImpulseResponse) -> Self {
        kernel.taps
    }
}

/// The nearest-neighbor kernel `[beta, alpha, beta]`.
pub fn nn_kernel(params: &LatticeParams) -> Result<ImpulseResponse> {
    params.validate()?;
    ImpulseResponse::new(vec![params.beta, params.alpha, params.beta])
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct KGridSpec {
    k_min: f64,
    k_max: f64,
    count: usize,
}

/// A uniform inclusive grid of k values, in radians per lattice unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KGridSpec", into = "KGridSpec")]
pub struct KGrid {
    k_min: f64,
    k_max: f64,
    count: usize,
    points: Vec<f64>,
}

impl KGrid {
    pub fn k_min(&self) -> f64 {
        self.k_min
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

impl TryFrom<KGridSpec> for KGrid {
    type Error = Error;

    fn try_from(spec: KGridSpec) -> Result<Self> {
        make_kgrid(spec.k_min, spec.k_max, spec.count)
    }
}

impl From<KGrid> for KGridSpec {
    fn from(grid: KGrid) -> Self {
        KGridSpec {
            k_min: grid.k_min,
            k_max: grid.k_max,
            count: grid.count,
        }
    }
}

/// Uniform inclusive grid of `count >= 2` points on `[k_min, k_max]`. Both
/// endpoints are hit exactly.
pub fn make_kgrid(k_min: f64, k_max: f64, count: usize) -> Result<KGrid> {
    if !k_min.is_finite() || !k_max.is_finite() {
        return Err(Error::InvalidArgument("k bounds must be finite".into()));
    }
    if count < 2 {
        return Err(Error::InvalidArgument("k grid needs at least 2 points".into()));
    }
    if k_min >= k_max {
        return Err(Error::InvalidArgument("k_min must be less than k_max".into()));
    }
    let span = k_max - k_min;
    let last = (count - 1) as f64;
    let points = (0..count)
        .map(|i| {
            if i == count - 1 {
                k_max
            } else {
                k_min + span * (i as f64) / last
            }
        })
        .collect();
    Ok(KGrid {
        k_min,
        k_max,
        count,
        points,
    })
}

/// Which route produced a band structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Closed-form folded cosine branches.
    Lti,
    /// Per-k diagonalization of the supercell Hamiltonian.
    Tb,
    /// Finite-difference kernel form of the primitive dispersion.
    Fd,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Lti => "lti",
            Engine::Tb => "tb",
            Engine::Fd => "fd",
        })
    }
}

/// Identifies where one energy value came from: an analytic branch index
/// (an even integer, two per canonical site) or a position in the ascending
/// eigenvalue list of a diagonalization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum BranchLabel {
    Branch(i64),
    Diag(usize),
}

impl fmt::Display for BranchLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BranchLabel::Branch(i) => write!(f, "{i}"),
            BranchLabel::Diag(n) => write!(f, "diag#{n}"),
        }
    }
}

impl FromStr for BranchLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(n) = s.strip_prefix("diag#") {
            let n = n
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("bad branch label '{s}'")))?;
            return Ok(BranchLabel::Diag(n));
        }
        let i = s
            .parse::<i64>()
            .map_err(|_| Error::InvalidArgument(format!("bad branch label '{s}'")))?;
        Ok(BranchLabel::Branch(i))
    }
}

impl TryFrom<String> for BranchLabel {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<BranchLabel> for String {
    fn from(label: BranchLabel) -> Self {
        label.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchEnergy {
    pub branch: BranchLabel,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KPointEnergies {
    pub k: f64,
    pub energies: Vec<BranchEnergy>,
}

/// Per-k, per-branch energies of an `m`-site cell, tagged with the engine
/// that produced them. Every k-point carries exactly `cell_size` energies and
/// all of them lie inside the `4|beta|` bandwidth window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandStructure {
    pub params: LatticeParams,
    pub cell_size: usize,
    pub engine: Engine,
    pub kgrid: KGrid,
    pub bands: Vec<KPointEnergies>,
}

impl BandStructure {
    pub fn new(
        params: LatticeParams,
        cell_size: usize,
        engine: Engine,
        kgrid: KGrid,
        bands: Vec<KPointEnergies>,
    ) -> Result<Self> {
        params.validate()?;
        if cell_size == 0 {
            return Err(Error::InvalidArgument("cell size must be at least 1".into()));
        }
        if bands.len() != kgrid.count() {
            return Err(Error::InternalConsistency(format!(
                "band list has {} entries for a {}-point grid",
                bands.len(),
                kgrid.count()
            )));
        }
        let (lo, hi) = params.energy_bounds();
        for (entry, &k) in bands.iter().zip(kgrid.points()) {
            if entry.k != k {
                return Err(Error::InternalConsistency(
                    "band entries out of grid order".into(),
                ));
            }
            if entry.energies.len() != cell_size {
                return Err(Error::InternalConsistency(format!(
                    "expected {} energies at k={}, found {}",
                    cell_size,
                    k,
                    entry.energies.len()
                )));
            }
            for be in &entry.energies {
                if !(be.value >= lo - ENERGY_BOUND_SLACK && be.value <= hi + ENERGY_BOUND_SLACK) {
                    return Err(Error::InternalConsistency(format!(
                        "energy {} at k={} outside [{}, {}]",
                        be.value, k, lo, hi
                    )));
                }
            }
        }
        Ok(Self {
            params,
            cell_size,
            engine,
            kgrid,
            bands,
        })
    }

    /// Ascending energies at grid index `idx`.
    pub fn sorted_energies_at(&self, idx: usize) -> Vec<f64> {
        let mut values: Vec<f64> = self.bands[idx].energies.iter().map(|b| b.value).collect();
        values.sort_by(f64::total_cmp);
        values
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn chain_params() -> LatticeParams {
        LatticeParams::new(-0.17, -0.24, 1.0).unwrap()
    }

    #[test]
    fn params_reject_bad_values() {
        assert!(LatticeParams::new(f64::NAN, 0.0, 1.0).is_err());
        assert!(LatticeParams::new(0.0, f64::INFINITY, 1.0).is_err());
        assert!(LatticeParams::new(0.0, 0.0, 0.0).is_err());
        assert!(LatticeParams::new(0.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn canonical_cell_matches_small_cases() {
        let positions = |m: usize| -> Vec<i64> {
            canonical_cell(m)
                .unwrap()
                .spikes()
                .iter()
                .map(|s| s.position)
                .collect()
        };
        assert_eq!(positions(1), vec![0]);
        assert_eq!(positions(2), vec![0, 1]);
        assert_eq!(positions(3), vec![-1, 0, 1]);
        assert_eq!(positions(4), vec![-1, 0, 1, 2]);
        assert!(canonical_cell(0).is_err());
    }

    #[test]
    fn canonical_cell_frame_properties() {
        for m in 1..=32 {
            let cell = canonical_cell(m).unwrap();
            let positions: Vec<i64> = cell.spikes().iter().map(|s| s.position).collect();
            assert_eq!(positions.len(), m);
            assert!(positions.contains(&0), "origin missing for m={m}");
            for pair in positions.windows(2) {
                assert_eq!(pair[1] - pair[0], 1, "positions not contiguous for m={m}");
            }
            assert!(positions[positions.len() - 1] >= -positions[0]);
            assert!(cell.spikes().iter().all(|s| s.weight == 1.0));
            if m % 2 == 1 {
                // odd cells are symmetric about the origin
                let mut negated: Vec<i64> = positions.iter().map(|p| -p).collect();
                negated.sort_unstable();
                assert_eq!(negated, positions);
            }
        }
    }

    #[test]
    fn spike_train_rejects_bad_input() {
        assert!(SpikeTrain::new(vec![]).is_err());
        assert!(SpikeTrain::unit(&[0, 0]).is_err());
        assert!(SpikeTrain::unit(&[1, 0]).is_err());
        assert!(SpikeTrain::new(vec![Spike {
            position: 0,
            weight: f64::NAN
        }])
        .is_err());
    }

    #[test]
    fn nn_kernel_examples() {
        let k = nn_kernel(&chain_params()).unwrap();
        assert_eq!(k.taps(), &[-0.24, -0.17, -0.24]);

        let zero = nn_kernel(&LatticeParams::new(0.0, 0.0, 1.0).unwrap()).unwrap();
        assert_eq!(zero.taps(), &[0.0, 0.0, 0.0]);

        let k = nn_kernel(&LatticeParams::new(5.0, -1.0, 1.0).unwrap()).unwrap();
        assert_eq!(k.taps(), &[-1.0, 5.0, -1.0]);
        assert_eq!(k.half_width(), 1);
        assert_eq!(k.tap_at(-1), -1.0);
        assert_eq!(k.tap_at(2), 0.0);
    }

    #[test]
    fn kernel_rejects_asymmetric_or_even() {
        assert!(ImpulseResponse::new(vec![1.0, 2.0]).is_err());
        assert!(ImpulseResponse::new(vec![1.0, 2.0, 3.0]).is_err());
        assert!(ImpulseResponse::new(vec![]).is_err());
        assert!(ImpulseResponse::new(vec![1.0, f64::NAN, 1.0]).is_err());
        assert!(ImpulseResponse::new(vec![1.0, 2.0, 1.0]).is_ok());
    }

    #[test]
    fn kgrid_examples() {
        let g = make_kgrid(0.0, PI, 3).unwrap();
        assert_eq!(g.points(), &[0.0, PI / 2.0, PI]);

        let g = make_kgrid(0.0, PI, 2).unwrap();
        assert_eq!(g.points(), &[0.0, PI]);

        let g = make_kgrid(-4.0 * PI, 4.0 * PI, 256).unwrap();
        assert_eq!(g.count(), 256);
        assert_eq!(g.points()[0], -4.0 * PI);
        assert_eq!(g.points()[255], 4.0 * PI);
        let step = g.points()[1] - g.points()[0];
        for pair in g.points().windows(2) {
            assert!((pair[1] - pair[0] - step).abs() < 1e-12);
        }
    }

    #[test]
    fn kgrid_rejects_bad_domains() {
        assert!(make_kgrid(0.0, 1.0, 1).is_err());
        assert!(make_kgrid(1.0, 1.0, 8).is_err());
        assert!(make_kgrid(2.0, 1.0, 8).is_err());
        assert!(make_kgrid(f64::NEG_INFINITY, 1.0, 8).is_err());
    }

    #[test]
    fn branch_label_round_trips_through_text() {
        for label in [
            BranchLabel::Branch(-2),
            BranchLabel::Branch(0),
            BranchLabel::Branch(4),
            BranchLabel::Diag(0),
            BranchLabel::Diag(7),
        ] {
            let text = label.to_string();
            assert_eq!(text.parse::<BranchLabel>().unwrap(), label);
        }
        assert!("diag#x".parse::<BranchLabel>().is_err());
        assert!("1.5".parse::<BranchLabel>().is_err());
    }

    #[test]
    fn band_structure_validates_shape_and_bounds() {
        let params = chain_params();
        let grid = make_kgrid(0.0, PI, 2).unwrap();
        let ok = |e: f64| KPointEnergies {
            k: 0.0,
            energies: vec![BranchEnergy {
                branch: BranchLabel::Branch(0),
                value: e,
            }],
        };

        // wrong k ordering
        let bands = vec![ok(-0.3), ok(-0.3)];
        assert!(BandStructure::new(params, 1, Engine::Lti, grid.clone(), bands).is_err());

        // energy outside the bandwidth window
        let bands = vec![
            KPointEnergies {
                k: 0.0,
                energies: vec![BranchEnergy {
                    branch: BranchLabel::Branch(0),
                    value: 5.0,
                }],
            },
            KPointEnergies {
                k: PI,
                energies: vec![BranchEnergy {
                    branch: BranchLabel::Branch(0),
                    value: -0.3,
                }],
            },
        ];
        assert!(BandStructure::new(params, 1, Engine::Lti, grid, bands).is_err());
    }

    #[test]
    fn types_round_trip_through_json() {
        let params = chain_params();
        let train = canonical_cell(4).unwrap();
        let kernel = nn_kernel(&params).unwrap();
        let grid = make_kgrid(0.0, PI, 7).unwrap();

        let p2: LatticeParams =
            serde_json::from_str(&serde_json::to_string(&params).unwrap()).unwrap();
        assert_eq!(p2, params);
        let t2: SpikeTrain = serde_json::from_str(&serde_json::to_string(&train).unwrap()).unwrap();
        assert_eq!(t2, train);
        let k2: ImpulseResponse =
            serde_json::from_str(&serde_json::to_string(&kernel).unwrap()).unwrap();
        assert_eq!(k2, kernel);
        let g2: KGrid = serde_json::from_str(&serde_json::to_string(&grid).unwrap()).unwrap();
        assert_eq!(g2, grid);
    }

    #[test]
    fn serde_rejects_invalid_payloads() {
        assert!(serde_json::from_str::<SpikeTrain>("[]").is_err());
        assert!(serde_json::from_str::<ImpulseResponse>("[1.0, 2.0, 3.0]").is_err());
        assert!(serde_json::from_str::<KGrid>(r#"{"k_min":1.0,"k_max":0.0,"count":4}"#).is_err());
    }
}
