//! The seven-segment display scenario: seven latent segment states
//! `X1..X7` (ids 1..=7) and seven observed lamps `O1..O7` (ids 8..=14).
//! A lit lamp implies its segment is on; a segment that is on may fail to
//! light its lamp. The latent states always spell one of the ten digits.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::circuit::{compile_formula, Circuit, Evidence, Formula, Shape, Var, Vtree};
use crate::error::Result;
use crate::infer::{map_psdd, robustness, RobustnessLabel, DEFAULT_TOL};
use crate::learn::{collect_counts, estimate_bayes, estimate_idm, Dataset, RowPolicy};
use crate::params::{CsddParams, PsddParams};

pub const SEGMENTS: usize = 7;

/// Segment patterns `a..g` (= `X1..X7`) of the digits 0 through 9.
pub const DIGITS: [[bool; SEGMENTS]; 10] = {
    const T: bool = true;
    const F: bool = false;
    [
        [T, T, T, T, T, T, F],
        [F, T, T, F, F, F, F],
        [T, T, F, T, T, F, T],
        [T, T, T, T, F, F, T],
        [F, T, T, F, F, T, T],
        [T, F, T, T, F, T, T],
        [T, F, T, T, T, T, T],
        [T, T, T, F, F, F, F],
        [T, T, T, T, T, T, T],
        [T, T, T, T, F, T, T],
    ]
};

pub fn x_var(i: usize) -> Var {
    i as Var + 1
}

pub fn o_var(i: usize) -> Var {
    (SEGMENTS + i) as Var + 1
}

pub fn variable_names() -> Vec<String> {
    let mut names: Vec<String> = (1..=SEGMENTS).map(|i| format!("X{i}")).collect();
    names.extend((1..=SEGMENTS).map(|i| format!("O{i}")));
    names
}

/// Each `(Xi, Oi)` pair is a sibling pair; the pairs form a balanced tree.
pub fn vtree() -> Vtree {
    let pairs = (0..SEGMENTS)
        .map(|i| Shape::node(Shape::Leaf(x_var(i)), Shape::Leaf(o_var(i))))
        .collect();
    Vtree::from_shape(&Shape::balanced(pairs))
}

/// `∧_i (Oi → Xi) ∧ ∨_digits (segment pattern)`.
pub fn formula() -> Formula {
    let mut parts: Vec<Formula> = (0..SEGMENTS)
        .map(|i| Formula::implies(Formula::Var(o_var(i)), Formula::Var(x_var(i))))
        .collect();
    let digits = DIGITS
        .iter()
        .map(|d| {
            let lits: Vec<(Var, bool)> =
                d.iter().enumerate().map(|(i, &b)| (x_var(i), b)).collect();
            Formula::term(&lits)
        })
        .collect();
    parts.push(Formula::Or(digits));
    Formula::And(parts)
}

pub fn circuit() -> Result<Circuit> {
    compile_formula(&formula(), &vtree())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Instance {
    pub digit: usize,
    pub x: [bool; SEGMENTS],
    pub o: [bool; SEGMENTS],
}

impl Instance {
    pub fn row(&self) -> Vec<bool> {
        self.x.iter().chain(self.o.iter()).copied().collect()
    }

    /// Evidence fixing the lamps only.
    pub fn evidence(&self) -> Evidence {
        let mut e = Evidence::empty(2 * SEGMENTS);
        for i in 0..SEGMENTS {
            e.set(o_var(i), self.o[i]).unwrap();
        }
        e
    }
}

/// Uniform digits; each lit segment fails to light its lamp with
/// probability `pf`.
pub fn generate_instances<R: Rng + ?Sized>(rng: &mut R, n: usize, pf: f64) -> Vec<Instance> {
    (0..n)
        .map(|_| {
            let digit = rng.gen_range(0..10);
            let x = DIGITS[digit];
            let mut o = x;
            for lamp in o.iter_mut() {
                if *lamp && rng.gen_bool(pf) {
                    *lamp = false;
                }
            }
            Instance { digit, x, o }
        })
        .collect()
}

pub fn to_dataset(instances: &[Instance]) -> Dataset {
    let mut d = Dataset::new(variable_names());
    for inst in instances {
        d.push(inst.row(), 1).unwrap();
    }
    d
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SegmentLabel {
    On,
    Off,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CredalClassification {
    pub lower: f64,
    pub upper: f64,
    pub label: SegmentLabel,
}

impl CredalClassification {
    pub fn from_interval(lower: f64, upper: f64) -> CredalClassification {
        let label = if lower > 0.5 {
            SegmentLabel::On
        } else if upper < 0.5 {
            SegmentLabel::Off
        } else {
            SegmentLabel::Indeterminate
        };
        CredalClassification {
            lower,
            upper,
            label,
        }
    }

    /// Discounted utility: 1 for a correct single label, 0 for a wrong one,
    /// 0.8 for the two-label set.
    pub fn u80(&self, truth: bool) -> f64 {
        match self.label {
            SegmentLabel::On => f64::from(u8::from(truth)),
            SegmentLabel::Off => f64::from(u8::from(!truth)),
            SegmentLabel::Indeterminate => 0.8,
        }
    }
}

/// Predictions for one test instance.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceResult {
    /// `P(Xi = 1 | o)` under the PSDD.
    pub precise: [f64; SEGMENTS],
    pub credal: [CredalClassification; SEGMENTS],
    /// MAP segment states under the PSDD.
    pub map: [bool; SEGMENTS],
    pub robust: RobustnessLabel,
}

/// Learned models for one experiment cell.
pub struct Models<'a> {
    pub circuit: &'a Circuit,
    pub psdd: PsddParams,
    pub csdd: CsddParams,
}

impl<'a> Models<'a> {
    /// Bayesian PSDD and IDM CSDD, both with equivalent sample size `s`.
    pub fn learn(circuit: &'a Circuit, train: &Dataset, s: f64) -> Result<Models<'a>> {
        let counts = collect_counts(circuit, train, RowPolicy::Strict)?;
        Ok(Models {
            circuit,
            psdd: estimate_bayes(circuit, &counts, s)?,
            csdd: estimate_idm(circuit, &counts, s)?,
        })
    }

    pub fn classify(&self, o: &[bool; SEGMENTS]) -> Result<InstanceResult> {
        let c = self.circuit;
        let inst = Instance {
            digit: 0,
            x: [false; SEGMENTS],
            o: *o,
        };
        let e = inst.evidence();
        let pe = crate::infer::marginal_psdd(c, &self.psdd, &e)?;
        let mut precise = [0.0; SEGMENTS];
        for (i, slot) in precise.iter_mut().enumerate() {
            *slot = crate::infer::marginal_psdd(c, &self.psdd, &e.with(x_var(i), true)?)? / pe;
        }
        let passes = crate::infer::EvidencePasses::new(c, &self.csdd, &e)?;
        let mut credal = [CredalClassification::from_interval(0.0, 1.0); SEGMENTS];
        for (i, slot) in credal.iter_mut().enumerate() {
            let lo = passes.lower(x_var(i), true, DEFAULT_TOL)?.value;
            let hi = passes.upper(x_var(i), true, DEFAULT_TOL)?.value;
            *slot = CredalClassification::from_interval(lo, hi);
        }
        let m = map_psdd(c, &self.psdd, &e)?;
        let mut map = [false; SEGMENTS];
        for (i, slot) in map.iter_mut().enumerate() {
            *slot = m.assignment[x_var(i) as usize - 1];
        }
        let robust = robustness(c, &self.csdd, &e, &m.assignment)?.label;
        Ok(InstanceResult {
            precise,
            credal,
            map,
            robust,
        })
    }
}

/// Accuracy figures for one cell. Split accuracies are `None` when the
/// split is empty.
#[derive(Clone, Debug, PartialEq)]
pub struct CellMetrics {
    pub accuracy: f64,
    pub determinacy: f64,
    pub det_acc: Option<f64>,
    pub indet_acc: Option<f64>,
    pub u80: f64,
    pub joint_accuracy: f64,
    pub joint_determinacy: f64,
    pub joint_det_acc: Option<f64>,
    pub joint_indet_acc: Option<f64>,
}

#[derive(Default)]
struct Tally {
    hit: usize,
    n: usize,
}

impl Tally {
    fn add(&mut self, ok: bool) {
        self.n += 1;
        self.hit += usize::from(ok);
    }

    fn rate(&self) -> Option<f64> {
        (self.n > 0).then(|| self.hit as f64 / self.n as f64)
    }
}

pub fn score(test: &[Instance], results: &[InstanceResult]) -> CellMetrics {
    let (mut all, mut det, mut indet) = (Tally::default(), Tally::default(), Tally::default());
    let (mut jall, mut jdet, mut jindet) = (Tally::default(), Tally::default(), Tally::default());
    let mut u80 = 0.0;
    for (inst, r) in test.iter().zip(results) {
        for i in 0..SEGMENTS {
            let ok = (r.precise[i] > 0.5) == inst.x[i];
            all.add(ok);
            if r.credal[i].label == SegmentLabel::Indeterminate {
                indet.add(ok);
            } else {
                det.add(ok);
            }
            u80 += r.credal[i].u80(inst.x[i]);
        }
        let ok = r.map == inst.x;
        jall.add(ok);
        if r.robust == RobustnessLabel::Robust {
            jdet.add(ok);
        } else {
            jindet.add(ok);
        }
    }
    let segs = (test.len() * SEGMENTS).max(1) as f64;
    CellMetrics {
        accuracy: all.rate().unwrap_or(0.0),
        determinacy: det.n as f64 / segs,
        det_acc: det.rate(),
        indet_acc: indet.rate(),
        u80: u80 / segs,
        joint_accuracy: jall.rate().unwrap_or(0.0),
        joint_determinacy: jdet.n as f64 / test.len().max(1) as f64,
        joint_det_acc: jdet.rate(),
        joint_indet_acc: jindet.rate(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellConfig {
    pub train_size: usize,
    pub test_size: usize,
    pub pf: f64,
    pub ess: f64,
}

/// Train on `train_size` instances and score `test_size` fresh ones, both
/// drawn from `rng` in that order.
pub fn run_cell<R: Rng + ?Sized>(
    circuit: &Circuit,
    cfg: &CellConfig,
    rng: &mut R,
) -> Result<CellMetrics> {
    let train = generate_instances(rng, cfg.train_size, cfg.pf);
    let test = generate_instances(rng, cfg.test_size, cfg.pf);
    let models = Models::learn(circuit, &to_dataset(&train), cfg.ess)?;
    let results = test
        .iter()
        .map(|inst| models.classify(&inst.o))
        .collect::<Result<Vec<_>>>()?;
    Ok(score(&test, &results))
}
