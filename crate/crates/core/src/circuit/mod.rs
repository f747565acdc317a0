//! The process relation as an R1CS circuit.
//!
//! Public input: the root key `rpk` as `(x, y)`. Witness: `l` attestation
//! chains of `n` signatures each, one per phase slot in slot order.

pub mod artifacts;
pub mod gadgets;
mod snark;

use std::fmt;

use ark_ff::Field;
use ark_r1cs_std::alloc::AllocVar;
use ark_r1cs_std::boolean::Boolean;
use ark_r1cs_std::eq::EqGadget;
use ark_r1cs_std::fields::fp::FpVar;
use ark_r1cs_std::fields::FieldVar;
use ark_r1cs_std::R1CSVar;
use ark_relations::r1cs::{
    ConstraintMatrices, ConstraintSynthesizer, ConstraintSystem, ConstraintSystemRef, OptimizationGoal, SynthesisError,
    SynthesisMode,
};
use serde::{Deserialize, Serialize};

use crate::attestation::{verify_chain, AttestationChain};
use crate::crypto::{CircuitField, Digest256, HashConfig, PublicKey, DOC_SEPARATOR, ROLE_SEPARATOR};
use crate::error::{Error, Result};
use crate::policy::{chain_policy_eval, phase_policy_eval, ChainPolicyConfig, PhasePolicyConfig};
use crate::spec::ProcessSpec;
use gadgets::bits::decompose_le;
use gadgets::refhash::{enforce_reference, DigestBits};
use gadgets::{enforce_signature, PointVar, SignatureVar};

pub use artifacts::{VerifierExport, FORMAT_VERSION};
pub use snark::{prove, setup, verify_proof, verify_proof_bytes, Proof, ProvingKey, VerificationKey};

type F = CircuitField;

/// Fixed parameters of one process relation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationParams {
    /// Number of chains `l`, one per phase slot.
    pub chains: usize,
    /// Signatures per chain `n`.
    pub height: usize,
    pub chain_policy: ChainPolicyConfig,
    pub phase_policy: PhasePolicyConfig,
    pub hash: HashConfig,
    pub spec_hash: Digest256,
}

impl RelationParams {
    pub fn from_spec(spec: &ProcessSpec) -> Self {
        Self {
            chains: spec.chains,
            height: spec.height,
            chain_policy: spec.chain_policy(),
            phase_policy: spec.phase_policy(),
            hash: spec.hash,
            spec_hash: spec.content_hash(),
        }
    }

    pub fn total_signatures(&self) -> usize {
        self.chains * self.height
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PublicInputs {
    pub rpk: PublicKey,
}

impl PublicInputs {
    pub fn new(rpk: PublicKey) -> Self {
        Self { rpk }
    }

    /// The field elements the verifier sees, in allocation order.
    pub fn to_field_elements(&self) -> Vec<F> {
        vec![self.rpk.x(), self.rpk.y()]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub chains: Vec<AttestationChain>,
}

impl Witness {
    pub fn new(chains: Vec<AttestationChain>) -> Self {
        Self { chains }
    }

    /// Checks chain count and per-chain signature count against `params`.
    pub fn check_shape(&self, params: &RelationParams) -> Result<()> {
        if self.chains.len() != params.chains {
            return Err(Error::ChainCount { expected: params.chains, actual: self.chains.len() });
        }
        for (slot, c) in self.chains.iter().enumerate() {
            if c.signature_count() != params.height {
                return Err(Error::malformed(
                    "witness",
                    format!(
                        "chain {slot} has {} signatures, relation expects {}",
                        c.signature_count(),
                        params.height
                    ),
                ));
            }
        }
        Ok(())
    }
}

/// A named block of constraints, used to report where a witness fails.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstraintGroup {
    /// Document signature of chain `i`.
    DocSig(usize),
    /// Role signature `j` of chain `i`.
    RoleSig(usize, usize),
    RootEquality(usize),
    ChainPolicy(usize),
    PhasePolicy,
}

impl fmt::Display for ConstraintGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DocSig(i) => write!(f, "doc-sig({i})"),
            Self::RoleSig(i, j) => write!(f, "role-sig({i},{j})"),
            Self::RootEquality(i) => write!(f, "root-equality({i})"),
            Self::ChainPolicy(i) => write!(f, "chain-policy({i})"),
            Self::PhasePolicy => write!(f, "phase-policy"),
        }
    }
}

/// Constraint index range `[start, end)` of one group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupSpan {
    pub group: ConstraintGroup,
    pub start: usize,
    pub end: usize,
}

impl GroupSpan {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitLayout {
    pub spans: Vec<GroupSpan>,
    pub num_constraints: usize,
    pub num_instance_variables: usize,
    pub num_witness_variables: usize,
}

impl CircuitLayout {
    pub fn group_of(&self, index: usize) -> Option<ConstraintGroup> {
        self.spans
            .iter()
            .find(|s| (s.start..s.end).contains(&index))
            .map(|s| s.group)
    }
}

/// Per-component constraint counts. The parts sum to `total`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub signatures: usize,
    pub per_signature: usize,
    pub root_equality: usize,
    pub chain_policy: usize,
    pub phase_policy: usize,
    pub other: usize,
    pub total: usize,
}

/// Document message variables: `[DOC_SEPARATOR, doctype, id_hi, id_lo, ref_hi, ref_lo]`.
pub fn doc_message_vars(doc: &DocVars) -> Vec<FpVar<F>> {
    vec![
        FpVar::Constant(*DOC_SEPARATOR),
        doc.doctype.clone(),
        doc.id_hi.clone(),
        doc.id_lo.clone(),
        doc.ref_hi.clone(),
        doc.ref_lo.clone(),
    ]
}

/// Role message variables: `[ROLE_SEPARATOR, pk.x, pk.y, permissions, 0, 0]`.
pub fn role_message_vars(pk: &PointVar, rinfo: &FpVar<F>) -> Vec<FpVar<F>> {
    vec![
        FpVar::Constant(*ROLE_SEPARATOR),
        pk.x.clone(),
        pk.y.clone(),
        rinfo.clone(),
        FpVar::zero(),
        FpVar::zero(),
    ]
}

/// The document fields of one chain as circuit variables.
#[derive(Clone, Debug)]
pub struct DocVars {
    pub doctype: FpVar<F>,
    pub id_hi: FpVar<F>,
    pub id_lo: FpVar<F>,
    pub ref_hi: FpVar<F>,
    pub ref_lo: FpVar<F>,
}

impl DocVars {
    pub fn new_witness(
        cs: ConstraintSystemRef<F>,
        chain: Option<&AttestationChain>,
    ) -> Result<Self, SynthesisError> {
        let d = chain.map(|c| c.dinfo);
        let w = |f: fn(&crate::attestation::DocInfo) -> F| {
            FpVar::new_witness(cs.clone(), || {
                d.as_ref().map(f).ok_or(SynthesisError::AssignmentMissing)
            })
        };
        Ok(Self {
            doctype: w(|d| F::from(d.doctype))?,
            id_hi: w(|d| F::from(d.identifier.hi()))?,
            id_lo: w(|d| F::from(d.identifier.lo()))?,
            ref_hi: w(|d| F::from(d.reference.hi()))?,
            ref_lo: w(|d| F::from(d.reference.lo()))?,
        })
    }
}

/// The relation as a [`ConstraintSynthesizer`]. Without a witness it only
/// shapes the constraint system, as needed for key generation.
#[derive(Clone, Copy, Debug)]
pub struct ProcessCircuit<'a> {
    pub params: &'a RelationParams,
    pub public: Option<&'a PublicInputs>,
    pub witness: Option<&'a Witness>,
}

impl<'a> ProcessCircuit<'a> {
    pub fn shape(params: &'a RelationParams) -> Self {
        Self { params, public: None, witness: None }
    }

    pub fn with_witness(params: &'a RelationParams, public: &'a PublicInputs, witness: &'a Witness) -> Self {
        Self { params, public: Some(public), witness: Some(witness) }
    }
}

impl ConstraintSynthesizer<F> for ProcessCircuit<'_> {
    fn generate_constraints(self, cs: ConstraintSystemRef<F>) -> Result<(), SynthesisError> {
        synthesize_into(cs, self.params, self.public, self.witness).map(|_| ())
    }
}

fn synthesize_into(
    cs: ConstraintSystemRef<F>,
    params: &RelationParams,
    public: Option<&PublicInputs>,
    witness: Option<&Witness>,
) -> Result<Vec<GroupSpan>, SynthesisError> {
    let (l, n) = (params.chains, params.height);
    if n == 0 || params.phase_policy.slots.len() != l {
        return Err(SynthesisError::Unsatisfiable);
    }
    if let Some(w) = witness {
        if w.check_shape(params).is_err() {
            return Err(SynthesisError::Unsatisfiable);
        }
    }
    let mut spans = Vec::new();
    let mut record = |group: ConstraintGroup, start: usize, cs: &ConstraintSystemRef<F>| {
        spans.push(GroupSpan { group, start, end: cs.num_constraints() });
    };
    let missing = SynthesisError::AssignmentMissing;

    let rpk = PointVar::new_input(cs.clone(), || public.map(|p| p.rpk.0).ok_or(missing))?;

    let cfg = &params.chain_policy;
    let width = cfg.mask_width();
    let undeclared = |k: usize| (cfg.universe >> k) & 1 == 0;

    let mut docs = Vec::with_capacity(l);
    for i in 0..l {
        let chain = witness.map(|w| &w.chains[i]);
        let doc = DocVars::new_witness(cs.clone(), chain)?;
        let pks_native = chain.map(|c| c.pks());
        let rinfos_native = chain.map(|c| c.rinfos());
        let sigs_native: Option<Vec<_>> = chain.map(|c| c.signatures().copied().collect());

        let mut pks = Vec::with_capacity(n);
        let mut rinfos = Vec::with_capacity(n);
        let mut sigs = Vec::with_capacity(n);
        for j in 0..n {
            pks.push(PointVar::new_witness(cs.clone(), || {
                pks_native.as_ref().map(|p| p[j].0).ok_or(missing)
            })?);
            rinfos.push(FpVar::new_witness(cs.clone(), || {
                rinfos_native.as_ref().map(|r| F::from(r[j].permissions)).ok_or(missing)
            })?);
            sigs.push(SignatureVar::new_witness(cs.clone(), || {
                sigs_native.as_ref().map(|s| s[j]).ok_or(missing)
            })?);
        }

        let start = cs.num_constraints();
        enforce_signature(&pks[0], &doc_message_vars(&doc), &sigs[0])?;
        record(ConstraintGroup::DocSig(i), start, &cs);

        for j in 0..n - 1 {
            let start = cs.num_constraints();
            enforce_signature(&pks[j + 1], &role_message_vars(&pks[j], &rinfos[j]), &sigs[j + 1])?;
            record(ConstraintGroup::RoleSig(i, j), start, &cs);
        }

        let start = cs.num_constraints();
        pks[n - 1].enforce_equal(&rpk)?;
        record(ConstraintGroup::RootEquality(i), start, &cs);

        let start = cs.num_constraints();
        enforce_chain_policy(cfg, width, &undeclared, &doc.doctype, &rinfos)?;
        record(ConstraintGroup::ChainPolicy(i), start, &cs);

        docs.push(doc);
    }

    let start = cs.num_constraints();
    enforce_phase_policy(&params.phase_policy, &docs)?;
    record(ConstraintGroup::PhasePolicy, start, &cs);

    Ok(spans)
}

/// Subset delegation: `doctype ⊆ U`, `doctype ∩ r_0 ≠ ∅`, `r_j ⊆ r_{j+1}`,
/// and the top permissions equal the root mask.
fn enforce_chain_policy(
    cfg: &ChainPolicyConfig,
    width: usize,
    undeclared: &dyn Fn(usize) -> bool,
    doctype: &FpVar<F>,
    rinfos: &[FpVar<F>],
) -> Result<(), SynthesisError> {
    let dbits = decompose_le(doctype, width, undeclared)?;
    let rbits: Vec<Vec<Boolean<F>>> = rinfos
        .iter()
        .map(|r| decompose_le(r, width, undeclared))
        .collect::<Result<_, _>>()?;

    let mut overlap = FpVar::zero();
    for (d, r) in dbits.iter().zip(&rbits[0]) {
        overlap += FpVar::from(d.clone()) * FpVar::from(r.clone());
    }
    let inv = if overlap.cs().is_none() {
        FpVar::Constant(overlap.value().ok().and_then(|v| v.inverse()).unwrap_or_default())
    } else {
        FpVar::new_witness(overlap.cs(), || {
            Ok(overlap.value()?.inverse().unwrap_or_default())
        })?
    };
    overlap.mul_equals(&inv, &FpVar::one())?;

    for pair in rbits.windows(2) {
        for (b, parent) in pair[0].iter().zip(&pair[1]) {
            FpVar::from(b.clone()).mul_equals(&FpVar::from(!parent), &FpVar::zero())?;
        }
    }
    rinfos[rinfos.len() - 1].enforce_equal(&FpVar::Constant(F::from(cfg.root_mask)))
}

/// Reference map: slot `i` holds its declared doctype and its reference equals
/// the hash of the identifiers of its referenced slots, in declared order.
fn enforce_phase_policy(cfg: &PhasePolicyConfig, docs: &[DocVars]) -> Result<(), SynthesisError> {
    let mut digests = Vec::with_capacity(docs.len());
    for (doc, slot) in docs.iter().zip(&cfg.slots) {
        doc.doctype.enforce_equal(&FpVar::Constant(F::from(*slot)))?;
        let bits = |v: &FpVar<F>| decompose_le(v, 128, |_| false);
        let id = DigestBits {
            hi: doc.id_hi.clone(),
            lo: doc.id_lo.clone(),
            hi_bits: bits(&doc.id_hi)?,
            lo_bits: bits(&doc.id_lo)?,
        };
        let reference = DigestBits {
            hi: doc.ref_hi.clone(),
            lo: doc.ref_lo.clone(),
            hi_bits: bits(&doc.ref_hi)?,
            lo_bits: bits(&doc.ref_lo)?,
        };
        digests.push((id, reference));
    }
    for (i, refs) in cfg.references.iter().enumerate() {
        let inputs: Vec<&DigestBits> = refs.iter().map(|&k| &digests[k].0).collect();
        enforce_reference(&inputs, &digests[i].1, cfg.ref_hash)?;
    }
    Ok(())
}

fn new_cs() -> ConstraintSystemRef<F> {
    let cs = ConstraintSystem::<F>::new_ref();
    cs.set_optimization_goal(OptimizationGoal::Constraints);
    cs
}

fn layout_of(cs: &ConstraintSystemRef<F>, spans: Vec<GroupSpan>) -> CircuitLayout {
    CircuitLayout {
        spans,
        num_constraints: cs.num_constraints(),
        num_instance_variables: cs.num_instance_variables(),
        num_witness_variables: cs.num_witness_variables(),
    }
}

/// Shapes the circuit without a witness and reports its layout.
pub fn shape(params: &RelationParams) -> Result<CircuitLayout> {
    let cs = new_cs();
    cs.set_mode(SynthesisMode::Setup);
    let spans = synthesize_into(cs.clone(), params, None, None)?;
    Ok(layout_of(&cs, spans))
}

pub fn constraint_count(params: &RelationParams) -> Result<usize> {
    Ok(shape(params)?.num_constraints)
}

pub fn cost_breakdown(params: &RelationParams) -> Result<CostBreakdown> {
    let layout = shape(params)?;
    let sum = |pred: &dyn Fn(&ConstraintGroup) -> bool| -> usize {
        layout.spans.iter().filter(|s| pred(&s.group)).map(GroupSpan::len).sum()
    };
    let signatures = sum(&|g| matches!(g, ConstraintGroup::DocSig(_) | ConstraintGroup::RoleSig(..)));
    let root_equality = sum(&|g| matches!(g, ConstraintGroup::RootEquality(_)));
    let chain_policy = sum(&|g| matches!(g, ConstraintGroup::ChainPolicy(_)));
    let phase_policy = sum(&|g| matches!(g, ConstraintGroup::PhasePolicy));
    let grouped = signatures + root_equality + chain_policy + phase_policy;
    Ok(CostBreakdown {
        signatures,
        per_signature: signatures / params.total_signatures().max(1),
        root_equality,
        chain_policy,
        phase_policy,
        other: layout.num_constraints - grouped,
        total: layout.num_constraints,
    })
}

/// A synthesized, satisfied constraint system ready for proving.
pub(crate) struct Satisfied {
    pub cs: ConstraintSystemRef<F>,
    pub layout: CircuitLayout,
    pub matrices: ConstraintMatrices<F>,
    /// Instance followed by witness assignment.
    pub assignment: Vec<F>,
}

pub(crate) fn synthesize_checked(
    params: &RelationParams,
    public: &PublicInputs,
    witness: &Witness,
) -> Result<Satisfied> {
    witness.check_shape(params)?;
    let cs = new_cs();
    let spans = synthesize_into(cs.clone(), params, Some(public), Some(witness))?;
    let layout = layout_of(&cs, spans);
    cs.finalize();
    let matrices = cs.to_matrices().ok_or(SynthesisError::MissingCS)?;
    let assignment: Vec<F> = {
        let inner = cs.borrow().ok_or(SynthesisError::MissingCS)?;
        inner
            .instance_assignment
            .iter()
            .chain(&inner.witness_assignment)
            .copied()
            .collect()
    };
    match first_unsatisfied(&matrices, &assignment) {
        None => Ok(Satisfied { cs, layout, matrices, assignment }),
        Some(index) => match layout.group_of(index) {
            Some(group) => Err(Error::Unsatisfied(group)),
            None => Err(SynthesisError::Unsatisfiable.into()),
        },
    }
}

/// Checks a witness against the relation; on failure names the first
/// constraint group that does not hold.
pub fn check_witness(params: &RelationParams, public: &PublicInputs, witness: &Witness) -> Result<CircuitLayout> {
    synthesize_checked(params, public, witness).map(|s| s.layout)
}

/// The relation evaluated natively: every chain verifies, meets the chain
/// policy and ends at `rpk`, and the documents meet the phase policy.
/// Agrees with circuit satisfiability.
pub fn relation_holds(params: &RelationParams, public: &PublicInputs, witness: &Witness) -> bool {
    if witness.check_shape(params).is_err() {
        return false;
    }
    let chains_ok = witness.chains.iter().all(|c| {
        verify_chain(c)
            && chain_policy_eval(&params.chain_policy, &c.dinfo, &c.rinfos())
            && c.terminal_pk() == public.rpk
    });
    let dinfos: Vec<_> = witness.chains.iter().map(|c| c.dinfo).collect();
    chains_ok && phase_policy_eval(&dinfos, &params.phase_policy)
}

/// Index of the first row with `<a,z> * <b,z> != <c,z>`, if any.
fn first_unsatisfied(matrices: &ConstraintMatrices<F>, z: &[F]) -> Option<usize> {
    let eval = |row: &[(F, usize)]| row.iter().map(|(c, i)| *c * z[*i]).sum::<F>();
    (0..matrices.num_constraints)
        .find(|&k| eval(&matrices.a[k]) * eval(&matrices.b[k]) != eval(&matrices.c[k]))
}
