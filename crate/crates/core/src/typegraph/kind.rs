use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::syntax::{pretty_type, SurfaceType};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Kind {
    Star,
    Row,
    Arrow(Box<Kind>, Box<Kind>),
}

impl Kind {
    pub fn arrow(from: Kind, to: Kind) -> Kind {
        Kind::Arrow(Box::new(from), Box::new(to))
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Star => write!(f, "*"),
            Kind::Row => write!(f, "row"),
            Kind::Arrow(a, b) if matches!(**a, Kind::Arrow(..)) => write!(f, "({a}) => {b}"),
            Kind::Arrow(a, b) => write!(f, "{a} => {b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KindError {
    #[error("kind mismatch in `{ty}`: expected {expected}, found {found}")]
    Mismatch {
        ty: String,
        expected: Kind,
        found: Kind,
    },
    #[error("unknown type constructor `{0}`")]
    UnknownConstructor(String),
    #[error("`{ty}` is applied to too many arguments")]
    OverApplied { ty: String },
    #[error("recursive type `{0}` has no constructor between its binder and a use")]
    UnguardedMu(String),
}

/// Constructor name to kind.
#[derive(Debug, Clone, PartialEq)]
pub struct KindEnv(HashMap<String, Kind>);

impl KindEnv {
    pub fn builtin() -> Self {
        let star = || Kind::Star;
        let mut m = HashMap::new();
        for name in ["Int", "Double", "String", "Date", "Currency", "Contract", "Bool", "Unit"] {
            m.insert(name.to_string(), star());
        }
        m.insert("Obs".into(), Kind::arrow(star(), star()));
        m.insert("List".into(), Kind::arrow(star(), star()));
        m.insert(
            super::ctor::ARROW.into(),
            Kind::arrow(star(), Kind::arrow(star(), star())),
        );
        m.insert(super::ctor::RECORD.into(), Kind::arrow(Kind::Row, star()));
        m.insert(super::ctor::VARIANT.into(), Kind::arrow(Kind::Row, star()));
        KindEnv(m)
    }

    pub fn get(&self, name: &str) -> Option<&Kind> {
        self.0.get(name)
    }

    pub fn insert(&mut self, name: &str, kind: Kind) {
        self.0.insert(name.to_string(), kind);
    }
}

/// Infers the kind of a surface type. Type variables take the kind of their
/// first use; `?` is only ever of kind `*`.
pub fn kind_check(ty: &SurfaceType, env: &KindEnv) -> Result<Kind, KindError> {
    let mut checker = Checker {
        env,
        vars: HashMap::new(),
        mu_bound: Vec::new(),
    };
    checker.synth(ty)
}

struct Checker<'e> {
    env: &'e KindEnv,
    vars: HashMap<String, Kind>,
    mu_bound: Vec<String>,
}

impl Checker<'_> {
    fn synth(&mut self, ty: &SurfaceType) -> Result<Kind, KindError> {
        match ty {
            SurfaceType::Var(v) if self.mu_bound.contains(v) => Ok(Kind::Star),
            SurfaceType::Var(v) => Ok(self.vars.entry(v.clone()).or_insert(Kind::Star).clone()),
            SurfaceType::Dyn => Ok(Kind::Star),
            SurfaceType::EmptyRow => Ok(Kind::Row),
            SurfaceType::Con(name, args) => {
                let mut kind = self
                    .env
                    .get(name)
                    .cloned()
                    .ok_or_else(|| KindError::UnknownConstructor(name.clone()))?;
                for arg in args {
                    let Kind::Arrow(from, to) = kind else {
                        return Err(KindError::OverApplied {
                            ty: pretty_type(ty),
                        });
                    };
                    self.check(arg, &from)?;
                    kind = *to;
                }
                Ok(kind)
            }
            SurfaceType::Arrow(a, b) => {
                self.check(a, &Kind::Star)?;
                self.check(b, &Kind::Star)?;
                Ok(Kind::Star)
            }
            SurfaceType::Record(row) | SurfaceType::Variant(row) => {
                self.check(row, &Kind::Row)?;
                Ok(Kind::Star)
            }
            SurfaceType::RowField { ty: fty, tail, .. } => {
                self.check(fty, &Kind::Star)?;
                self.check(tail, &Kind::Row)?;
                Ok(Kind::Row)
            }
            SurfaceType::Mu(v, body) => {
                if !guarded(v, body) {
                    return Err(KindError::UnguardedMu(pretty_type(ty)));
                }
                self.mu_bound.push(v.clone());
                let r = self.check(body, &Kind::Star);
                self.mu_bound.pop();
                r.map(|_| Kind::Star)
            }
        }
    }

    fn check(&mut self, ty: &SurfaceType, expected: &Kind) -> Result<(), KindError> {
        if let SurfaceType::Var(v) = ty {
            if !self.mu_bound.contains(v) && !self.vars.contains_key(v) {
                self.vars.insert(v.clone(), expected.clone());
                return Ok(());
            }
        }
        let found = self.synth(ty)?;
        if &found == expected {
            Ok(())
        } else {
            Err(KindError::Mismatch {
                ty: pretty_type(ty),
                expected: expected.clone(),
                found,
            })
        }
    }
}

/// Every free occurrence of `v` in `body` sits under a constructor.
fn guarded(v: &str, body: &SurfaceType) -> bool {
    match body {
        SurfaceType::Var(w) => w != v,
        SurfaceType::Mu(w, inner) => w == v || guarded(v, inner),
        _ => true,
    }
}
