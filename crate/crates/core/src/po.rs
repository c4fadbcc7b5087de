//! Retrenchment and refinement proof-obligation checking over trajectory
//! fragments.
//!
//! A refinement step demands that the concrete system simulate the abstract
//! one under a retrieve relation `R`: assuming `R` before a step (plus an
//! input relation), `R` must be re-established after it, along with an output
//! relation. Retrenchment liberalizes this with three extra relations: a
//! within relation `W` strengthens the hypothesis, an output relation `O`
//! strengthens the conclusion, and a concedes relation `C` weakens it
//! disjunctively:
//!
//! ```text
//! R(before) ∧ W  ⇒  (R(after) ∧ O) ∨ C
//! ```
//!
//! The checker evaluates this implication on a supplied pair of fragments.
//! The abstract fragment doubles as the witness for the existential over
//! abstract executions; searching trajectory spaces for witnesses is out of
//! scope. A hypothesis that fails is reported as its own verdict so a
//! vacuous instance is never mistaken for a meaningful pass.
//!
//! The instantiation for the stopping system relates the continuous ramp
//! trajectory to its zero-order-hold counterpart: `R` is trivially true (no
//! state correspondence is claimed), `W` demands equal starts and an L2
//! control gap within `a_D T sqrt(stop_time)`, `O` bounds the final state
//! deviation by `e^{stop_time} a_D T stop_time`, and `C` is false. Exact
//! state correspondence is impossible here: the trajectories drift apart
//! linearly in time, so a refinement with an identity retrieve relation
//! fails where the retrenchment succeeds.

use std::fmt;
use std::io;

use crate::bounds;
use crate::error::Result;
use crate::model::{ControlSignal, State, SystemParams};
use crate::report::fmt_sig12;
use crate::simulate::{require_same_grid, GridSpec, Trajectory};

/// Quadrature resolution used by the instantiated within relation when it
/// measures the L2 control gap (substeps per smooth segment).
const W_QUADRATURE_SUBSTEPS: u32 = 1000;

/// One evaluated inequality `value <= bound`, kept for the witness record.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckedInequality {
    pub label: String,
    pub value: f64,
    pub bound: f64,
    pub holds: bool,
}

impl CheckedInequality {
    /// Records `value <= bound`. A NaN value counts as failed.
    pub fn le(label: impl Into<String>, value: f64, bound: f64) -> Self {
        CheckedInequality {
            label: label.into(),
            value,
            bound,
            holds: value <= bound,
        }
    }
}

/// Outcome of one relation: the truth value plus the inequalities behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct PredicateOutcome {
    pub holds: bool,
    pub witnesses: Vec<CheckedInequality>,
}

impl PredicateOutcome {
    /// A bare truth value with nothing measurable behind it.
    pub fn trivial(holds: bool) -> Self {
        PredicateOutcome {
            holds,
            witnesses: Vec::new(),
        }
    }

    /// Conjunction of the given checks.
    pub fn from_checks(witnesses: Vec<CheckedInequality>) -> Self {
        PredicateOutcome {
            holds: witnesses.iter().all(|c| c.holds),
            witnesses,
        }
    }
}

/// Relation over an (abstract, concrete) state pair.
pub type StatePairPredicate = Box<dyn Fn(&State, &State) -> PredicateOutcome + Send + Sync>;

/// Relation over an (abstract, concrete) input pair.
pub type InputPairPredicate =
    Box<dyn Fn(&ControlSignal, &ControlSignal) -> PredicateOutcome + Send + Sync>;

/// Relation over an (abstract, concrete) fragment pair; sees inputs and
/// before-states at once, as the within relation requires.
pub type FragmentPairPredicate = Box<dyn Fn(&Fragment, &Fragment) -> PredicateOutcome + Send + Sync>;

/// Always-true state relation.
pub fn state_pred_true() -> StatePairPredicate {
    Box::new(|_, _| PredicateOutcome::trivial(true))
}

/// Always-false state relation.
pub fn state_pred_false() -> StatePairPredicate {
    Box::new(|_, _| PredicateOutcome::trivial(false))
}

/// Always-true input relation.
pub fn input_pred_true() -> InputPairPredicate {
    Box::new(|_, _| PredicateOutcome::trivial(true))
}

/// Identity retrieve relation: both state components must coincide exactly.
pub fn state_identity() -> StatePairPredicate {
    Box::new(|a, c| {
        PredicateOutcome::from_checks(vec![
            CheckedInequality::le("R: position gap", (a.position - c.position).abs(), 0.0),
            CheckedInequality::le("R: velocity gap", (a.velocity - c.velocity).abs(), 0.0),
        ])
    })
}

/// One execution piece used as the unit of checking: a trajectory over
/// `[0, stop_time]` together with the input that produced it. The observable
/// output sequence is carried as a slot; the stopping system emits none.
#[derive(Debug, Clone)]
pub struct Fragment {
    trajectory: Trajectory,
    input: ControlSignal,
    outputs: Vec<f64>,
}

impl Fragment {
    pub fn new(trajectory: Trajectory, input: ControlSignal) -> Self {
        Fragment {
            trajectory,
            input,
            outputs: Vec::new(),
        }
    }

    pub fn trajectory(&self) -> &Trajectory {
        &self.trajectory
    }

    pub fn input(&self) -> &ControlSignal {
        &self.input
    }

    pub fn params(&self) -> &SystemParams {
        self.trajectory.params()
    }

    pub fn outputs(&self) -> &[f64] {
        &self.outputs
    }

    /// State at the start of the fragment.
    pub fn before_state(&self) -> State {
        self.trajectory.initial_state()
    }

    /// State at the end of the fragment.
    pub fn after_state(&self) -> State {
        self.trajectory.final_state()
    }
}

/// The four relations of one retrenchment, plus an optional whole-interval
/// check that contributes witnesses without affecting the verdict.
pub struct RetrenchmentData {
    pub retrieve: StatePairPredicate,
    pub within: FragmentPairPredicate,
    pub output: StatePairPredicate,
    pub concedes: StatePairPredicate,
    /// Extra per-interval evidence (for the stopping system: the final-state
    /// bound re-checked as a supremum over all shared samples).
    pub interval: Option<FragmentPairPredicate>,
}

impl RetrenchmentData {
    pub fn new(
        retrieve: StatePairPredicate,
        within: FragmentPairPredicate,
        output: StatePairPredicate,
        concedes: StatePairPredicate,
    ) -> Self {
        RetrenchmentData {
            retrieve,
            within,
            output,
            concedes,
            interval: None,
        }
    }

    pub fn with_interval_check(mut self, interval: FragmentPairPredicate) -> Self {
        self.interval = Some(interval);
        self
    }
}

/// Verdict of one proof-obligation instance. A failed hypothesis makes the
/// implication vacuously true but the instance uninformative; it is kept
/// apart from a genuine conclusion failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    FailHypothesisUnmet,
    FailConclusion,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::FailHypothesisUnmet => "fail_hypothesis_unmet",
            Verdict::FailConclusion => "fail_conclusion",
        })
    }
}

/// Result of checking one proof obligation: the verdict, each relation's
/// truth value, and every inequality evaluated along the way.
#[derive(Debug, Clone)]
pub struct PoResult {
    pub verdict: Verdict,
    pub retrieve_before: bool,
    pub within: bool,
    pub retrieve_after: bool,
    pub output: bool,
    pub concedes: bool,
    /// Truth of the optional whole-interval check, if one was supplied.
    pub interval: Option<bool>,
    pub witnesses: Vec<CheckedInequality>,
}

impl PoResult {
    /// Writes the human-readable report block.
    ///
    /// # Errors
    ///
    /// Propagates I/O errors from the writer.
    pub fn write_report<W: io::Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "verdict: {}", self.verdict)?;
        writeln!(out, "relations:")?;
        writeln!(out, "  R (before)   {}", self.retrieve_before)?;
        writeln!(out, "  W            {}", self.within)?;
        writeln!(out, "  R (after)    {}", self.retrieve_after)?;
        writeln!(out, "  O            {}", self.output)?;
        writeln!(out, "  C            {}", self.concedes)?;
        if let Some(interval) = self.interval {
            writeln!(out, "  interval     {interval}")?;
        }
        if !self.witnesses.is_empty() {
            writeln!(out, "witnesses:")?;
            for w in &self.witnesses {
                writeln!(
                    out,
                    "  {:<28} {:>14.6} <= {:>14.6}  {}",
                    w.label,
                    w.value,
                    w.bound,
                    if w.holds { "ok" } else { "VIOLATED" }
                )?;
            }
        }
        Ok(())
    }

    /// Writes the witness table as CSV.
    ///
    /// # Errors
    ///
    /// Propagates I/O errors from the writer.
    pub fn write_witness_csv<W: io::Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "check,value,bound,holds")?;
        for w in &self.witnesses {
            writeln!(
                out,
                "{},{},{},{}",
                w.label,
                fmt_sig12(w.value),
                fmt_sig12(w.bound),
                w.holds
            )?;
        }
        writeln!(out, "verdict,{},,", self.verdict)
    }
}

/// Initialization obligation: the supplied abstract initial state witnesses
/// that the concrete one is retrievable. True iff `R` holds on the pair.
pub fn check_init_po(
    abstract_init: &State,
    concrete_init: &State,
    retrieve: &StatePairPredicate,
) -> bool {
    retrieve(abstract_init, concrete_init).holds
}

/// The stopping-system retrenchment: trivial `R`, equal starts plus an L2
/// control-gap budget in `W`, the explicit deviation bound on both final
/// state components in `O`, false `C`, and the same bound re-checked over
/// the whole interval as extra evidence.
pub fn train_retrenchment_data(params: &SystemParams) -> RetrenchmentData {
    train_retrenchment_data_with_output_bound(params, bounds::gronwall_bound(params))
}

/// Same as [`train_retrenchment_data`] but with an explicit output bound,
/// for negative controls and what-if runs.
pub fn train_retrenchment_data_with_output_bound(
    params: &SystemParams,
    output_bound: f64,
) -> RetrenchmentData {
    let l2_bound = bounds::l2_control_gap_bound(params);
    let within: FragmentPairPredicate = Box::new(move |a, c| {
        let (sa, sc) = (a.before_state(), c.before_state());
        let mut checks = vec![
            CheckedInequality::le(
                "W: start position gap",
                (sa.position - sc.position).abs(),
                0.0,
            ),
            CheckedInequality::le(
                "W: start velocity gap",
                (sa.velocity - sc.velocity).abs(),
                0.0,
            ),
        ];
        // Incomparable horizons surface as a NaN witness, which fails.
        let quadrature = GridSpec::new(W_QUADRATURE_SUBSTEPS).expect("constant is non-zero");
        let l2 = bounds::l2_gap_between(a.input(), a.params(), c.input(), c.params(), quadrature)
            .unwrap_or(f64::NAN);
        checks.push(CheckedInequality::le("W: L2 control gap", l2, l2_bound));
        PredicateOutcome::from_checks(checks)
    });

    let output: StatePairPredicate = Box::new(move |a, c| {
        PredicateOutcome::from_checks(vec![
            CheckedInequality::le(
                "O: final position gap",
                (a.position - c.position).abs(),
                output_bound,
            ),
            CheckedInequality::le(
                "O: final velocity gap",
                (a.velocity - c.velocity).abs(),
                output_bound,
            ),
        ])
    });

    let interval: FragmentPairPredicate = Box::new(move |a, c| {
        match bounds::linf_deviation(a.trajectory(), c.trajectory()) {
            Ok((sup_x, sup_v)) => PredicateOutcome::from_checks(vec![
                CheckedInequality::le("interval: max position gap", sup_x, output_bound),
                CheckedInequality::le("interval: max velocity gap", sup_v, output_bound),
            ]),
            Err(_) => PredicateOutcome::from_checks(vec![CheckedInequality::le(
                "interval: max gap",
                f64::NAN,
                output_bound,
            )]),
        }
    });

    RetrenchmentData::new(state_pred_true(), within, output, state_pred_false())
        .with_interval_check(interval)
}

/// Checks the retrenchment correctness obligation on one fragment pair.
///
/// # Errors
///
/// Returns [`crate::Error::GridMismatch`] if the fragments do not share
/// their sample grid.
pub fn check_retrenchment_po(
    abstract_frag: &Fragment,
    concrete_frag: &Fragment,
    data: &RetrenchmentData,
) -> Result<PoResult> {
    require_same_grid(abstract_frag.trajectory(), concrete_frag.trajectory())?;

    let retrieve_before =
        (data.retrieve)(&abstract_frag.before_state(), &concrete_frag.before_state());
    let within = (data.within)(abstract_frag, concrete_frag);
    let retrieve_after =
        (data.retrieve)(&abstract_frag.after_state(), &concrete_frag.after_state());
    let output = (data.output)(&abstract_frag.after_state(), &concrete_frag.after_state());
    let concedes = (data.concedes)(&abstract_frag.after_state(), &concrete_frag.after_state());
    let interval = data
        .interval
        .as_ref()
        .map(|check| check(abstract_frag, concrete_frag));

    let hypothesis = retrieve_before.holds && within.holds;
    let conclusion = (retrieve_after.holds && output.holds) || concedes.holds;
    let verdict = if !hypothesis {
        Verdict::FailHypothesisUnmet
    } else if conclusion {
        Verdict::Pass
    } else {
        Verdict::FailConclusion
    };

    let mut witnesses = Vec::new();
    witnesses.extend(retrieve_before.witnesses.iter().cloned());
    witnesses.extend(within.witnesses.iter().cloned());
    witnesses.extend(retrieve_after.witnesses.iter().cloned());
    witnesses.extend(output.witnesses.iter().cloned());
    witnesses.extend(concedes.witnesses.iter().cloned());
    if let Some(outcome) = &interval {
        witnesses.extend(outcome.witnesses.iter().cloned());
    }

    Ok(PoResult {
        verdict,
        retrieve_before: retrieve_before.holds,
        within: within.holds,
        retrieve_after: retrieve_after.holds,
        output: output.holds,
        concedes: concedes.holds,
        interval: interval.map(|o| o.holds),
        witnesses,
    })
}

/// Checks the refinement correctness obligation: a degenerate retrenchment
/// whose within relation is the input relation lifted to fragments and whose
/// concedes relation is false.
///
/// # Errors
///
/// As [`check_retrenchment_po`].
pub fn check_refinement_po(
    abstract_frag: &Fragment,
    concrete_frag: &Fragment,
    retrieve: StatePairPredicate,
    input_rel: InputPairPredicate,
    output_rel: StatePairPredicate,
) -> Result<PoResult> {
    let within: FragmentPairPredicate = Box::new(move |a, c| input_rel(a.input(), c.input()));
    let data = RetrenchmentData::new(retrieve, within, output_rel, state_pred_false());
    check_retrenchment_po(abstract_frag, concrete_frag, &data)
}

/// Sanity check that the exact final gap cannot outgrow the certified
/// deviation bound: their ratio reduces to
/// `stop_time / 12 * (1 + 1/N) <= e^{stop_time}`, a linear function against
/// an exponential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corroboration {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Evaluates the corroboration inequality for one parameter set.
pub fn corroboration(params: &SystemParams) -> Corroboration {
    let lhs = params.stop_time / 12.0 * (1.0 + 1.0 / f64::from(params.periods));
    let rhs = params.stop_time.exp();
    Corroboration {
        lhs,
        rhs,
        holds: lhs <= rhs,
    }
}
