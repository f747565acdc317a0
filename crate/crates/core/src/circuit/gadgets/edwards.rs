//! Twisted Edwards arithmetic over the circuit field (`a = 1`, `d = 168696/168700`).

use ark_ec::twisted_edwards::TECurveConfig;
use ark_ec::{AffineRepr, CurveGroup};
use ark_ed_on_bn254::{EdwardsConfig, EdwardsProjective};
use ark_ff::{Field, One, Zero};
use ark_r1cs_std::alloc::AllocVar;
use ark_r1cs_std::boolean::Boolean;
use ark_r1cs_std::eq::EqGadget;
use ark_r1cs_std::fields::fp::FpVar;
use ark_r1cs_std::fields::FieldVar;
use ark_r1cs_std::select::CondSelectGadget;
use ark_r1cs_std::R1CSVar;
use ark_relations::r1cs::{ConstraintSystemRef, Namespace, SynthesisError};

use crate::crypto::{CircuitField, CurvePoint};

type F = CircuitField;

fn coeff_d() -> F {
    <EdwardsConfig as TECurveConfig>::COEFF_D
}

/// Returns `num / den`, or zero when `den` is zero, as a witness bound by
/// `result * den == num`.
fn divide(num: &FpVar<F>, den: &FpVar<F>) -> Result<FpVar<F>, SynthesisError> {
    if let (FpVar::Constant(n), FpVar::Constant(d)) = (num, den) {
        return Ok(FpVar::Constant(d.inverse().map(|i| *n * i).unwrap_or_default()));
    }
    let cs = num.cs().or(den.cs());
    let q = FpVar::new_witness(cs, || {
        let n = num.value()?;
        let d = den.value()?;
        Ok(d.inverse().map(|i| n * i).unwrap_or_default())
    })?;
    q.mul_equals(den, num)?;
    Ok(q)
}

/// Affine point with coordinates as field variables.
#[derive(Clone, Debug)]
pub struct PointVar {
    pub x: FpVar<F>,
    pub y: FpVar<F>,
}

impl PointVar {
    pub fn constant(p: CurvePoint) -> Self {
        Self { x: FpVar::Constant(p.x), y: FpVar::Constant(p.y) }
    }

    pub fn identity() -> Self {
        Self::constant(CurvePoint::identity())
    }

    /// Allocates raw coordinates. No curve membership is implied.
    pub fn new_witness(
        cs: impl Into<Namespace<F>>,
        f: impl FnOnce() -> Result<CurvePoint, SynthesisError>,
    ) -> Result<Self, SynthesisError> {
        let ns = cs.into();
        let cs = ns.cs();
        let p = f().ok();
        let x = FpVar::new_witness(cs.clone(), || p.map(|p| p.x).ok_or(SynthesisError::AssignmentMissing))?;
        let y = FpVar::new_witness(cs, || p.map(|p| p.y).ok_or(SynthesisError::AssignmentMissing))?;
        Ok(Self { x, y })
    }

    pub fn new_input(
        cs: ConstraintSystemRef<F>,
        f: impl FnOnce() -> Result<CurvePoint, SynthesisError>,
    ) -> Result<Self, SynthesisError> {
        let p = f().ok();
        let x = FpVar::new_input(cs.clone(), || p.map(|p| p.x).ok_or(SynthesisError::AssignmentMissing))?;
        let y = FpVar::new_input(cs, || p.map(|p| p.y).ok_or(SynthesisError::AssignmentMissing))?;
        Ok(Self { x, y })
    }

    pub fn value(&self) -> Result<CurvePoint, SynthesisError> {
        Ok(CurvePoint { x: self.x.value()?, y: self.y.value()? })
    }

    /// `x^2 + y^2 == 1 + d x^2 y^2`.
    pub fn enforce_on_curve(&self) -> Result<(), SynthesisError> {
        let x2 = self.x.square()?;
        let y2 = self.y.square()?;
        let x2y2 = &x2 * &y2;
        (&x2 + &y2).enforce_equal(&(x2y2 * coeff_d() + F::one()))
    }

    pub fn negate(&self) -> Self {
        Self { x: self.x.negate().expect("negation is infallible"), y: self.y.clone() }
    }

    /// Unified addition; complete for points on the curve.
    pub fn add(&self, other: &Self) -> Result<Self, SynthesisError> {
        let a = &self.x * &other.x;
        let b = &self.y * &other.y;
        let c = (&self.x + &self.y) * (&other.x + &other.y);
        let dd = (&a * &b) * coeff_d();
        let x3 = divide(&(&c - &a - &b), &(&dd + F::one()))?;
        let y3 = divide(&(&b - &a), &(FpVar::Constant(F::one()) - &dd))?;
        Ok(Self { x: x3, y: y3 })
    }

    /// Dedicated doubling; uses the curve equation to drop the `d` term.
    pub fn double(&self) -> Result<Self, SynthesisError> {
        let xx = self.x.square()?;
        let yy = self.y.square()?;
        let xy = &self.x * &self.y;
        let x3 = divide(&xy.double()?, &(&xx + &yy))?;
        let y3 = divide(&(&yy - &xx), &(FpVar::Constant(F::from(2u64)) - &xx - &yy))?;
        Ok(Self { x: x3, y: y3 })
    }

    pub fn select(cond: &Boolean<F>, t: &Self, f: &Self) -> Result<Self, SynthesisError> {
        Ok(Self {
            x: FpVar::conditionally_select(cond, &t.x, &f.x)?,
            y: FpVar::conditionally_select(cond, &t.y, &f.y)?,
        })
    }

    pub fn enforce_equal(&self, other: &Self) -> Result<(), SynthesisError> {
        self.x.enforce_equal(&other.x)?;
        self.y.enforce_equal(&other.y)
    }

    /// `[k]self` for little-endian `bits`, most significant bit first.
    pub fn scalar_mul_le(&self, bits: &[Boolean<F>]) -> Result<Self, SynthesisError> {
        let mut acc = Self::identity();
        for bit in bits.iter().rev() {
            acc = acc.double()?;
            let sum = acc.add(self)?;
            acc = Self::select(bit, &sum, &acc)?;
        }
        Ok(acc)
    }

    /// `[k]base` for a constant base using 2-bit windows of precomputed multiples.
    pub fn fixed_base_mul_le(base: CurvePoint, bits: &[Boolean<F>]) -> Result<Self, SynthesisError> {
        let base = base
            .to_affine()
            .ok_or(SynthesisError::Unsatisfiable)?
            .into_group();
        let mut window_base: EdwardsProjective = base;
        let mut acc: Option<Self> = None;
        for pair in bits.chunks(2) {
            let b0 = pair[0].clone();
            let b1 = pair.get(1).cloned().unwrap_or(Boolean::FALSE);
            let t: Vec<CurvePoint> = (0..4u64)
                .map(|k| {
                    let p = if k == 0 { EdwardsProjective::zero() } else { window_base * ark_ed_on_bn254::Fr::from(k) };
                    CurvePoint::from_affine(&p.into_affine())
                })
                .collect();
            let f0 = FpVar::from(b0.clone());
            let f1 = FpVar::from(b1.clone());
            let f01 = FpVar::from(&b0 & &b1);
            let lookup = |c: fn(&CurvePoint) -> F| {
                let (t0, t1, t2, t3) = (c(&t[0]), c(&t[1]), c(&t[2]), c(&t[3]));
                &f0 * (t1 - t0) + &f1 * (t2 - t0) + &f01 * (t3 - t2 - t1 + t0) + t0
            };
            let sel = Self { x: lookup(|p| p.x), y: lookup(|p| p.y) };
            acc = Some(match acc {
                None => sel,
                Some(a) => a.add(&sel)?,
            });
            for _ in 0..2 {
                window_base = window_base + window_base;
            }
        }
        Ok(acc.unwrap_or_else(Self::identity))
    }
}
