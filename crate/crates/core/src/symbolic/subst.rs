//! Specialization of atoms, parameters and the potential, and replacement of
//! time-derivative tags by the evolution law.

use std::collections::{BTreeMap, HashMap};

use super::{Coord, Expr, Factor, FieldAtom, FieldKind, Poly, Symbol, SymbolicError, Var};

/// Anything that converts to a normal form.
pub trait ToPoly {
    fn to_normal_form(&self) -> Result<Poly, SymbolicError>;
}

impl ToPoly for Expr {
    fn to_normal_form(&self) -> Result<Poly, SymbolicError> {
        Poly::from_expr(self)
    }
}

impl ToPoly for Poly {
    fn to_normal_form(&self) -> Result<Poly, SymbolicError> {
        Ok(self.clone())
    }
}

/// Substitution map. Field bindings are given for base atoms; bindings for
/// derivative atoms are accepted only as a coherence-checked redundancy.
#[derive(Clone, Debug, Default)]
pub struct Bindings {
    fields: BTreeMap<FieldAtom, Poly>,
    potential: Option<(Coord, Poly)>,
    params: BTreeMap<Symbol, Poly>,
    coords: BTreeMap<Coord, Poly>,
}

impl Bindings {
    pub fn new() -> Self {
        Bindings::default()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty() && self.potential.is_none() && self.params.is_empty() && self.coords.is_empty()
    }

    /// Binds the base atom `P` or `PB`.
    pub fn field(self, kind: FieldKind, value: &impl ToPoly) -> Result<Self, SymbolicError> {
        self.atom(FieldAtom::base(kind), value)
    }

    /// Binds an arbitrary (possibly derivative) atom.
    pub fn atom(mut self, atom: FieldAtom, value: &impl ToPoly) -> Result<Self, SymbolicError> {
        self.fields.insert(atom, value.to_normal_form()?);
        Ok(self)
    }

    /// Binds `V` to `body`, a function of the coordinate `var`: `V(a)` becomes
    /// `body[var := a]`, and `V⁽ⁿ⁾(a)` the n-th derivative of `body` at `a`.
    pub fn potential(mut self, var: Coord, body: &impl ToPoly) -> Result<Self, SymbolicError> {
        self.potential = Some((var, body.to_normal_form()?));
        Ok(self)
    }

    pub fn param(mut self, name: &str, value: &impl ToPoly) -> Result<Self, SymbolicError> {
        self.params.insert(Symbol::new(name), value.to_normal_form()?);
        Ok(self)
    }

    pub fn coord(mut self, c: Coord, value: &impl ToPoly) -> Result<Self, SymbolicError> {
        self.coords.insert(c, value.to_normal_form()?);
        Ok(self)
    }

    fn base_binding(&self, kind: FieldKind) -> Option<&Poly> {
        self.fields.get(&FieldAtom::base(kind))
    }

    fn check_coherence(&self) -> Result<(), SymbolicError> {
        for (atom, value) in &self.fields {
            if atom.tag.is_base() {
                continue;
            }
            let base = self
                .base_binding(atom.kind)
                .ok_or(SymbolicError::DerivativeBindingWithoutBase(*atom))?;
            if derive_atom(base, atom) != *value {
                return Err(SymbolicError::IncoherentBinding(*atom));
            }
        }
        Ok(())
    }
}

fn derive_atom(base: &Poly, atom: &FieldAtom) -> Poly {
    let mut p = base.clone();
    for c in [Coord::X, Coord::Y, Coord::T] {
        for _ in 0..atom.tag.order(c) {
            p = p.derivative(&Var::Coord(c));
        }
    }
    p
}

struct Substituter<'a> {
    b: &'a Bindings,
    atoms: HashMap<FieldAtom, Poly>,
    /// Off while specializing a field binding's own value, so a binding may
    /// mention the atom it replaces.
    fields: bool,
}

impl Substituter<'_> {
    fn run(&mut self, p: &Poly) -> Result<Poly, SymbolicError> {
        p.rebuild(&|c| c.clone(), &mut |f| self.factor(f))
    }

    fn factor(&mut self, f: &Factor) -> Result<Poly, SymbolicError> {
        match f {
            Factor::Field(a) if !self.fields => Ok(Poly::field(*a)),
            Factor::Field(a) => {
                if let Some(v) = self.atoms.get(a) {
                    return Ok(v.clone());
                }
                let v = match self.b.base_binding(a.kind) {
                    Some(base) => {
                        let d = derive_atom(base, a);
                        Substituter { b: self.b, atoms: HashMap::new(), fields: false }.run(&d)?
                    }
                    None => Poly::field(*a),
                };
                self.atoms.insert(*a, v.clone());
                Ok(v)
            }
            Factor::Coord(c) => Ok(self.b.coords.get(c).cloned().unwrap_or_else(|| Poly::coord(*c))),
            Factor::Param(s) => Ok(self.b.params.get(s).cloned().unwrap_or_else(|| Poly::from_factor(f.clone()))),
            Factor::Potential { order, arg } => {
                let arg = self.run(arg)?;
                match &self.b.potential {
                    Some((var, body)) => {
                        let mut d = body.clone();
                        for _ in 0..*order {
                            d = d.derivative(&Var::Coord(*var));
                        }
                        // Parameters inside the body are specialized too.
                        let inner = Bindings { params: self.b.params.clone(), ..Bindings::default() }
                            .coord(*var, &arg)?;
                        Substituter { b: &inner, atoms: HashMap::new(), fields: true }.run(&d)
                    }
                    None => Ok(Poly::potential(*order, arg)),
                }
            }
            Factor::Ln(p) => self.run(p)?.ln(),
            Factor::Exp(q) => self.run(q)?.exp(),
            Factor::Sum(p) => self.run(p),
        }
    }
}

impl Poly {
    /// Applies `bindings`; derivative atoms take the matching derivative of
    /// their base binding, computed before coordinates are replaced.
    pub fn substitute(&self, bindings: &Bindings) -> Result<Poly, SymbolicError> {
        bindings.check_coherence()?;
        if bindings.is_empty() {
            return Ok(self.clone());
        }
        Substituter { b: bindings, atoms: HashMap::new(), fields: true }.run(self)
    }
}

/// Tree form of [`Poly::substitute`]; the result is normalized.
pub fn substitute(e: &Expr, bindings: &Bindings) -> Result<Expr, SymbolicError> {
    Ok(Poly::from_expr(e)?.substitute(bindings)?.to_expr())
}

/// Evolution law `i∂ₜΨ = (−Δ + V + R[Ψ])Ψ` used to eliminate time-derivative
/// tags. `R` is given in terms of the atoms; its conjugate drives `PB`.
#[derive(Clone, Debug)]
pub struct Evolution {
    pub potential: Poly,
    pub nonlinearity: Option<Poly>,
}

impl Default for Evolution {
    fn default() -> Self {
        Evolution { potential: Poly::potential(0, Poly::coord(Coord::Y)), nonlinearity: None }
    }
}

impl Evolution {
    /// Linear evolution with potential `V(y)`.
    pub fn linear() -> Self {
        Evolution::default()
    }

    pub fn with_potential(mut self, v: Poly) -> Self {
        self.potential = v;
        self
    }

    pub fn with_nonlinearity(mut self, r: Poly) -> Self {
        self.nonlinearity = Some(r);
        self
    }

    /// Value of `i∂ₜ` applied to the base atom of `kind`.
    fn rhs(&self, kind: FieldKind) -> Poly {
        let atom = Poly::field(FieldAtom::base(kind));
        let lap = Poly::field(FieldAtom::new(kind, 2, 0, 0)).add(&Poly::field(FieldAtom::new(kind, 0, 2, 0)));
        let mut pot = self.potential.clone();
        if let Some(r) = &self.nonlinearity {
            pot.add_assign(&match kind {
                FieldKind::P => r.clone(),
                FieldKind::PB => r.conj(),
            });
        }
        let linear = pot.mul(&atom).sub(&lap);
        match kind {
            FieldKind::P => linear,
            FieldKind::PB => linear.neg(),
        }
    }

    /// Replaces every first-order time tag by the spatial derivative of the
    /// evolution right-hand side, i.e. `∂ₜ ↦ i∂ₜ`.
    pub fn apply(&self, p: &Poly) -> Result<Poly, SymbolicError> {
        let mut cache: HashMap<FieldAtom, Poly> = HashMap::new();
        self.apply_cached(p, &mut cache)
    }

    fn apply_cached(&self, p: &Poly, cache: &mut HashMap<FieldAtom, Poly>) -> Result<Poly, SymbolicError> {
        p.rebuild(&|c| c.clone(), &mut |f| match f {
            Factor::Field(a) if a.tag.t == 0 => Ok(Poly::field(*a)),
            Factor::Field(a) if a.tag.t == 1 => {
                if let Some(v) = cache.get(a) {
                    return Ok(v.clone());
                }
                let mut v = self.rhs(a.kind);
                for _ in 0..a.tag.x {
                    v = v.derivative(&Var::Coord(Coord::X));
                }
                for _ in 0..a.tag.y {
                    v = v.derivative(&Var::Coord(Coord::Y));
                }
                cache.insert(*a, v.clone());
                Ok(v)
            }
            Factor::Field(a) => Err(SymbolicError::HigherTimeDerivative { atom: *a, order: a.tag.t }),
            Factor::Potential { order, arg } => Ok(Poly::potential(*order, self.apply_cached(arg, cache)?)),
            Factor::Ln(q) => self.apply_cached(q, cache)?.ln(),
            Factor::Exp(q) => self.apply_cached(q, cache)?.exp(),
            Factor::Sum(q) => self.apply_cached(q, cache),
            other => Ok(Poly::from_factor(other.clone())),
        })
    }
}

/// Linear evolution with potential `V(y)`: `∂ₜP ↦ −ΔP + V·P`,
/// `∂ₜPB ↦ ΔPB − V·PB`. The result is normalized.
pub fn substitute_time_derivatives(e: &Expr) -> Result<Expr, SymbolicError> {
    substitute_time_derivatives_with(e, &Evolution::default())
}

pub fn substitute_time_derivatives_with(e: &Expr, ev: &Evolution) -> Result<Expr, SymbolicError> {
    Ok(ev.apply(&Poly::from_expr(e)?)?.to_expr())
}
