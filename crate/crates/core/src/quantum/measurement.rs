use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, C64};
use super::state::{DensityMatrix, StateVector};
use super::{ALGEBRA_TOL, EIGEN_CLIP};
use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementKind {
    Projective,
    Povm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementOutcome {
    pub label: String,
    pub element: ComplexMatrix,
}

/// A finite family of labelled measurement operators.
///
/// Elements are positive semidefinite and sum to the identity; projective
/// measurements additionally have idempotent, mutually orthogonal elements.
/// Zero elements are allowed and simply never fire.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasurementDump", into = "MeasurementDump")]
pub struct Measurement {
    kind: MeasurementKind,
    outcomes: Vec<MeasurementOutcome>,
}

#[derive(Serialize, Deserialize)]
struct MeasurementDump {
    kind: MeasurementKind,
    outcomes: Vec<MeasurementOutcome>,
}

impl TryFrom<MeasurementDump> for Measurement {
    type Error = Error;

    fn try_from(d: MeasurementDump) -> Result<Self> {
        Measurement::new(d.kind, d.outcomes)
    }
}

impl From<Measurement> for MeasurementDump {
    fn from(m: Measurement) -> Self {
        MeasurementDump {
            kind: m.kind,
            outcomes: m.outcomes,
        }
    }
}

impl Measurement {
    pub fn new(kind: MeasurementKind, outcomes: Vec<MeasurementOutcome>) -> Result<Self> {
        let first = outcomes
            .first()
            .ok_or_else(|| invalid("a measurement needs at least one outcome"))?;
        let dim = first.element.rows();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for (k, o) in outcomes.iter().enumerate() {
            if o.element.rows() != dim || !o.element.is_square() {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: o.element.rows(),
                });
            }
            if o.element.to_row_major().iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(invalid(format!("measurement element {:?} is not finite", o.label)));
            }
            if outcomes[..k].iter().any(|p| p.label == o.label) {
                return Err(invalid(format!("duplicate outcome label {:?}", o.label)));
            }
            let min = o.element.eigh()?.values[0];
            if min < -ALGEBRA_TOL {
                return Err(Error::Invariant(format!(
                    "measurement element {:?} is not positive semidefinite (min eigenvalue {min})",
                    o.label
                )));
            }
            sum = &sum + &o.element;
        }
        if sum.max_abs_diff(&ComplexMatrix::identity(dim)) > ALGEBRA_TOL {
            return Err(Error::Invariant(
                "measurement elements do not sum to identity".into(),
            ));
        }
        if kind == MeasurementKind::Projective {
            for (k, a) in outcomes.iter().enumerate() {
                if (&a.element * &a.element).max_abs_diff(&a.element) > ALGEBRA_TOL {
                    return Err(Error::Invariant(format!(
                        "element {:?} is not idempotent",
                        a.label
                    )));
                }
                for b in &outcomes[k + 1..] {
                    if (&a.element * &b.element).max_abs_diff(&ComplexMatrix::zeros(dim, dim))
                        > ALGEBRA_TOL
                    {
                        return Err(Error::Invariant(format!(
                            "elements {:?} and {:?} are not orthogonal",
                            a.label, b.label
                        )));
                    }
                }
            }
        }
        Ok(Self { kind, outcomes })
    }

    pub fn projective(elements: Vec<(String, ComplexMatrix)>) -> Result<Self> {
        Self::new(
            MeasurementKind::Projective,
            elements
                .into_iter()
                .map(|(label, element)| MeasurementOutcome { label, element })
                .collect(),
        )
    }

    pub fn povm(elements: Vec<(String, ComplexMatrix)>) -> Result<Self> {
        Self::new(
            MeasurementKind::Povm,
            elements
                .into_iter()
                .map(|(label, element)| MeasurementOutcome { label, element })
                .collect(),
        )
    }

    /// Projective measurement in the computational basis, labels `"0"`, `"1"`, ...
    pub fn computational(dim: usize) -> Result<Self> {
        Self::projective(
            (0..dim)
                .map(|k| {
                    let mut e = vec![C64::new(0.0, 0.0); dim];
                    e[k] = C64::new(1.0, 0.0);
                    (k.to_string(), ComplexMatrix::outer(&e, &e))
                })
                .collect(),
        )
    }

    pub fn kind(&self) -> MeasurementKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.outcomes[0].element.rows()
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &[MeasurementOutcome] {
        &self.outcomes
    }

    pub fn labels(&self) -> Vec<String> {
        self.outcomes.iter().map(|o| o.label.clone()).collect()
    }

    pub fn element(&self, k: usize) -> &ComplexMatrix {
        &self.outcomes[k].element
    }

    /// Operator applied to the state for outcome `k` (Lüders instrument).
    pub fn kraus(&self, k: usize) -> Result<ComplexMatrix> {
        match self.kind {
            MeasurementKind::Projective => Ok(self.outcomes[k].element.clone()),
            MeasurementKind::Povm => self.outcomes[k]
                .element
                .hermitian_map(|x| x.max(0.0).sqrt()),
        }
    }
}

/// Probability distribution over labelled outcomes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbDist {
    labels: Vec<String>,
    probabilities: Vec<f64>,
}

impl ProbDist {
    pub fn new(labels: Vec<String>, probabilities: Vec<f64>) -> Result<Self> {
        if labels.len() != probabilities.len() || labels.is_empty() {
            return Err(invalid(
                "labels and probabilities must be non-empty and equal length",
            ));
        }
        if probabilities
            .iter()
            .any(|&p| !(-ALGEBRA_TOL..=1.0 + ALGEBRA_TOL).contains(&p))
        {
            return Err(Error::Invariant("probability outside [0, 1]".into()));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > ALGEBRA_TOL {
            return Err(Error::Invariant(format!("probabilities sum to {total}")));
        }
        Ok(Self {
            labels,
            probabilities,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|k| self.probabilities[k])
    }
}

fn clip_probability(p: f64) -> f64 {
    if p < 0.0 && p > -EIGEN_CLIP {
        0.0
    } else if p > 1.0 && p < 1.0 + EIGEN_CLIP {
        1.0
    } else {
        p
    }
}

/// Distribution `p_k = tr(E_k ρ)` of measuring `rho` with `measurement`.
pub fn outcome_distribution(rho: &DensityMatrix, measurement: &Measurement) -> Result<ProbDist> {
    if rho.dim() != measurement.dim() {
        return Err(Error::DimensionMismatch {
            expected: measurement.dim(),
            actual: rho.dim(),
        });
    }
    let probs = measurement
        .outcomes()
        .iter()
        .map(|o| clip_probability(o.element.matrix_product_trace(rho.matrix())))
        .collect();
    ProbDist::new(measurement.labels(), probs)
}

impl ComplexMatrix {
    /// `Re tr(self · other)` without forming the product.
    pub(crate) fn matrix_product_trace(&self, other: &ComplexMatrix) -> f64 {
        let n = self.rows();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.get(i, j) * other.get(j, i);
            }
        }
        acc.re
    }
}

/// States that can be measured on a subset of their registers.
pub trait Measurable: Sized {
    /// Outcome probabilities of `measurement` lifted onto `registers`.
    fn outcome_probabilities(
        &self,
        measurement: &Measurement,
        registers: &[usize],
    ) -> Result<Vec<f64>>;

    /// Post-measurement state for outcome `k`, renormalised.
    fn collapse(&self, measurement: &Measurement, k: usize, registers: &[usize]) -> Result<Self>;
}

impl Measurable for StateVector {
    fn outcome_probabilities(
        &self,
        measurement: &Measurement,
        registers: &[usize],
    ) -> Result<Vec<f64>> {
        measurement
            .outcomes()
            .iter()
            .map(|o| {
                self.local_expectation(&o.element, registers)
                    .map(clip_probability)
            })
            .collect()
    }

    fn collapse(&self, measurement: &Measurement, k: usize, registers: &[usize]) -> Result<Self> {
        let kraus = measurement.kraus(k)?;
        let image = self.apply_local_raw(&kraus, registers)?;
        let p: f64 = image.iter().map(|z| z.norm_sqr()).sum();
        if !(p > 0.0) {
            return Err(Error::Internal(format!(
                "outcome {:?} has zero probability (norm² {p:e}) and cannot be collapsed onto",
                measurement.outcomes()[k].label
            )));
        }
        let scale = p.sqrt();
        StateVector::new(
            image.into_iter().map(|z| z / scale).collect(),
            self.layout().clone(),
        )
    }
}

impl Measurable for DensityMatrix {
    fn outcome_probabilities(
        &self,
        measurement: &Measurement,
        registers: &[usize],
    ) -> Result<Vec<f64>> {
        measurement
            .outcomes()
            .iter()
            .map(|o| {
                let lifted = self.layout().lift(&o.element, registers)?;
                Ok(clip_probability(lifted.matrix_product_trace(self.matrix())))
            })
            .collect()
    }

    fn collapse(&self, measurement: &Measurement, k: usize, registers: &[usize]) -> Result<Self> {
        let kraus = self.layout().lift(&measurement.kraus(k)?, registers)?;
        let image = &(&kraus * self.matrix()) * &kraus.adjoint();
        let p = image.trace().re;
        if !(p > 0.0) {
            return Err(Error::Internal(format!(
                "outcome {:?} has zero probability (trace {p:e}) and cannot be collapsed onto",
                measurement.outcomes()[k].label
            )));
        }
        DensityMatrix::new(image.scale(1.0 / p), self.layout().clone())
    }
}

/// Picks index `k` with probability `weights[k] / Σ weights` using `u ∈ [0, 1)`.
pub(crate) fn pick_weighted(weights: &[f64], u: f64) -> Result<usize> {
    let total: f64 = weights.iter().map(|w| w.max(0.0)).sum();
    if !(total > 0.0) {
        return Err(Error::Internal(format!(
            "no positive weight among {weights:?}"
        )));
    }
    let target = u * total;
    let mut acc = 0.0;
    let mut last_positive = None;
    for (k, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last_positive = Some(k);
        if target < acc {
            return Ok(k);
        }
    }
    // u * total can round up to exactly `acc`.
    last_positive.ok_or_else(|| Error::Internal("weighted choice fell through".into()))
}

/// Samples an outcome of `measurement` on `registers` and returns its label
/// together with the post-measurement state.
pub fn measure<S: Measurable>(
    state: &S,
    measurement: &Measurement,
    registers: &[usize],
    rng: &mut dyn RngCore,
) -> Result<(String, S)> {
    let probs = state.outcome_probabilities(measurement, registers)?;
    let k = pick_weighted(&probs, rng.random::<f64>())?;
    let post = state.collapse(measurement, k, registers)?;
    Ok((measurement.outcomes()[k].label.clone(), post))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bit::Bit;
    use crate::quantum::{RegisterLayout, StateVector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn computational_basis_is_valid_projective() {
        let m = Measurement::computational(4).unwrap();
        assert_eq!(m.len(), 4);
        assert_eq!(m.kind(), MeasurementKind::Projective);
    }

    #[test]
    fn rejects_incomplete_and_non_orthogonal() {
        let p0 = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(Measurement::projective(vec![("0".into(), p0.clone())]).is_err());
        let plus = ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]).unwrap();
        let rest = &ComplexMatrix::identity(2) - &plus;
        // Valid as a projective pair.
        assert!(
            Measurement::projective(vec![("+".into(), plus.clone()), ("-".into(), rest)]).is_ok()
        );
        // p0 and plus are not orthogonal and do not sum to identity.
        assert!(Measurement::projective(vec![("a".into(), p0), ("b".into(), plus)]).is_err());
    }

    #[test]
    fn povm_accepts_non_projectors() {
        let half = ComplexMatrix::identity(2).scale(0.5);
        let m = Measurement::povm(vec![("a".into(), half.clone()), ("b".into(), half.clone())])
            .unwrap();
        assert!(
            Measurement::projective(vec![("a".into(), half.clone()), ("b".into(), half)]).is_err()
        );
        let k = m.kraus(0).unwrap();
        assert!((k.get(0, 0).re - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn distribution_examples() {
        let comp = Measurement::computational(2).unwrap();
        let half = DensityMatrix::maximally_mixed(RegisterLayout::qubits(1).unwrap());
        assert_eq!(
            outcome_distribution(&half, &comp).unwrap().probabilities(),
            &[0.5, 0.5]
        );

        let diag = StateVector::diagonal(Bit::ZERO).to_density();
        let d = outcome_distribution(&diag, &comp).unwrap();
        assert!((d.probabilities()[0] - 0.5).abs() < 1e-12);
        assert!((d.probabilities()[1] - 0.5).abs() < 1e-12);

        let zero = StateVector::qubit(Bit::ZERO).to_density();
        let d = outcome_distribution(&zero, &comp).unwrap();
        assert_eq!(d.probabilities(), &[1.0, 0.0]);

        let four = Measurement::computational(4).unwrap();
        assert!(matches!(
            outcome_distribution(&zero, &four),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn measuring_zero_is_deterministic() {
        let comp = Measurement::computational(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let (label, post) =
                measure(&StateVector::qubit(Bit::ZERO), &comp, &[0], &mut rng).unwrap();
            assert_eq!(label, "0");
            assert_eq!(post, StateVector::qubit(Bit::ZERO));
        }
    }

    #[test]
    fn measuring_one_register_leaves_other_untouched() {
        let s = StateVector::qubit(Bit::ZERO)
            .tensor(&StateVector::diagonal(Bit::ZERO))
            .unwrap();
        // Register 1 is |0⟩, register 0 is |0_×⟩; measure register 1.
        let comp = Measurement::computational(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (label, post) = measure(&s, &comp, &[1], &mut rng).unwrap();
        assert_eq!(label, "0");
        assert!(post.equals_up_to_phase(&s, 1e-12));
        let dm = s.to_density();
        let (_, post_dm) = measure(&dm, &comp, &[1], &mut rng).unwrap();
        assert!(post_dm.max_abs_diff(&dm) < 1e-12);
    }

    #[test]
    fn seeded_measurement_is_reproducible() {
        let comp = Measurement::computational(2).unwrap();
        let s = StateVector::diagonal(Bit::ONE);
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..100)
                .map(|_| measure(&s, &comp, &[0], &mut rng).unwrap().0)
                .collect::<Vec<_>>()
        };
        assert_eq!(run(5), run(5));
    }

    #[test]
    fn diagonal_state_frequencies_within_four_sigma() {
        let comp = Measurement::computational(2).unwrap();
        let s = StateVector::diagonal(Bit::ZERO);
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n = 100_000;
        let zeros = (0..n)
            .filter(|_| measure(&s, &comp, &[0], &mut rng).unwrap().0 == "0")
            .count();
        let f = zeros as f64 / n as f64;
        assert!((f - 0.5).abs() <= 0.01, "frequency {f}");
        assert!((f - 0.5).abs() <= 4.0 * (0.25 / n as f64).sqrt());
    }

    #[test]
    fn pick_weighted_skips_zero_weights() {
        assert_eq!(pick_weighted(&[0.0, 1.0], 0.0).unwrap(), 1);
        assert_eq!(pick_weighted(&[0.5, 0.0, 0.5], 0.999_999).unwrap(), 2);
        assert!(pick_weighted(&[0.0, 0.0], 0.3).is_err());
    }
}
