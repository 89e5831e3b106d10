//! Primitive functions and their types.

use std::cmp::Ordering;
use std::rc::Rc;

use super::value::{ArithOp, Contract, Obs, PrimApp, Value};
use super::{Blame, PriceTable, RuntimeError, RuntimeTypeError};
use crate::syntax::{parse_type, SurfaceType};

/// The variant `dynamic_to_type` returns.
pub const TYPE_REP: &str = "[TInt; TDouble; TString; TDate; TCurrency; TObsDouble; TContract; TFun; TRecord : List String; TVariant : String]";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    Eq,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prim {
    One,
    Give,
    And,
    Scale,
    European,
    StockPrice,
    Spot,
    Const,
    ObsAt,
    Concat,
    IntToDouble,
    DynObsMul,
    DynamicToType,
    AnyToString,
    Arith(ArithOp),
    Compare(CompareOp),
}

impl Prim {
    pub fn arity(self) -> usize {
        match self {
            Prim::One | Prim::Give | Prim::Spot | Prim::Const | Prim::IntToDouble => 1,
            Prim::DynamicToType | Prim::AnyToString => 1,
            _ => 2,
        }
    }
}

/// Typed builtins, as `(name, type)`. Infix arithmetic and comparison are
/// overloaded and typed by inference directly, so they are absent here.
pub fn builtin_types() -> Vec<(&'static str, SurfaceType)> {
    let rep = TYPE_REP;
    let sigs: Vec<(&str, String)> = vec![
        ("zero", "Contract".into()),
        ("one", "Currency -> Contract".into()),
        ("give", "Contract -> Contract".into()),
        ("and", "Contract -> Contract -> Contract".into()),
        ("scale", "Obs Double -> Contract -> Contract".into()),
        ("european", "Date -> Contract -> Contract".into()),
        ("stock_price", "Date -> String -> Obs Double".into()),
        ("spot", "String -> Obs Double".into()),
        ("const", "Double -> Obs Double".into()),
        ("obs_at", "Obs Double -> Date -> Double".into()),
        ("concat", "String -> String -> String".into()),
        ("int_to_double", "Int -> Double".into()),
        ("dyn_obs_mul", "Obs Double -> ? -> ?".into()),
        ("**", "Obs Double -> ? -> ?".into()),
        ("dynamic_to_type", format!("? -> {rep}")),
        ("any_to_string", "? -> String".into()),
    ];
    sigs.into_iter()
        .map(|(name, ty)| (name, parse_type(&ty).expect("builtin signature parses")))
        .collect()
}

/// Runtime values for every builtin name, including the infix operators.
pub fn builtin_values() -> Vec<(&'static str, Value)> {
    let prim = |p| Value::Prim(Rc::new(PrimApp { prim: p, args: Vec::new() }));
    vec![
        ("zero", Value::contract(Contract::Zero)),
        ("one", prim(Prim::One)),
        ("give", prim(Prim::Give)),
        ("and", prim(Prim::And)),
        ("scale", prim(Prim::Scale)),
        ("european", prim(Prim::European)),
        ("stock_price", prim(Prim::StockPrice)),
        ("spot", prim(Prim::Spot)),
        ("const", prim(Prim::Const)),
        ("obs_at", prim(Prim::ObsAt)),
        ("concat", prim(Prim::Concat)),
        ("int_to_double", prim(Prim::IntToDouble)),
        ("dyn_obs_mul", prim(Prim::DynObsMul)),
        ("**", prim(Prim::DynObsMul)),
        ("dynamic_to_type", prim(Prim::DynamicToType)),
        ("any_to_string", prim(Prim::AnyToString)),
        ("+", prim(Prim::Arith(ArithOp::Add))),
        ("-", prim(Prim::Arith(ArithOp::Sub))),
        ("*", prim(Prim::Arith(ArithOp::Mul))),
        ("/", prim(Prim::Arith(ArithOp::Div))),
        ("==", prim(Prim::Compare(CompareOp::Eq))),
        ("<", prim(Prim::Compare(CompareOp::Lt))),
        ("<=", prim(Prim::Compare(CompareOp::Le))),
        (">", prim(Prim::Compare(CompareOp::Gt))),
        (">=", prim(Prim::Compare(CompareOp::Ge))),
    ]
}

/// The runtime type of a value, as a `TYPE_REP` variant.
pub fn dynamic_to_type(v: &Value) -> Value {
    let unit = Value::unit;
    match v {
        Value::Int(_) => Value::variant("TInt", unit()),
        Value::Double(_) => Value::variant("TDouble", unit()),
        Value::Str(_) => Value::variant("TString", unit()),
        Value::Date(_) => Value::variant("TDate", unit()),
        Value::Currency(_) => Value::variant("TCurrency", unit()),
        Value::Obs(_) => Value::variant("TObsDouble", unit()),
        Value::Contract(_) => Value::variant("TContract", unit()),
        Value::Closure(_) | Value::Prim(_) | Value::Guard(_) => Value::variant("TFun", unit()),
        Value::Record(fields) => {
            let labels = fields.iter().map(|(l, _)| Value::str(l)).collect();
            Value::variant("TRecord", Value::list(labels))
        }
        Value::Variant(label, _) => Value::variant("TVariant", Value::Str(label.clone())),
    }
}

/// Runs a saturated primitive. `blame` points at the last argument.
pub(super) fn run(prim: Prim, args: &[Value], blame: &Blame, prices: &PriceTable) -> Result<Value, RuntimeError> {
    let bad = |expected: &str, v: &Value| -> RuntimeError {
        RuntimeTypeError {
            blame: blame.clone(),
            site: None,
            expected: expected.to_string(),
            actual: v.tag(),
        }
        .into()
    };
    let contract = |v: &Value| match v {
        Value::Contract(c) => Ok(c.clone()),
        other => Err(bad("Contract", other)),
    };
    let obs = |v: &Value| match v {
        Value::Obs(o) => Ok(o.clone()),
        other => Err(bad("Obs Double", other)),
    };
    let date = |v: &Value| match v {
        Value::Date(d) => Ok(*d),
        other => Err(bad("Date", other)),
    };
    let string = |v: &Value| match v {
        Value::Str(s) => Ok(s.clone()),
        other => Err(bad("String", other)),
    };
    Ok(match (prim, args) {
        (Prim::One, [Value::Currency(c)]) => Value::contract(Contract::One(c.clone())),
        (Prim::One, [v]) => return Err(bad("Currency", v)),
        (Prim::Give, [c]) => Value::contract(Contract::Give(contract(c)?)),
        (Prim::And, [a, b]) => Value::contract(Contract::And(contract(a)?, contract(b)?)),
        (Prim::Scale, [o, c]) => Value::contract(Contract::Scale(obs(o)?, contract(c)?)),
        (Prim::European, [d, c]) => Value::contract(Contract::European(date(d)?, contract(c)?)),
        (Prim::StockPrice, [d, s]) => Value::obs(Obs::Fixing {
            date: date(d)?,
            company: string(s)?.to_string(),
        }),
        (Prim::Spot, [s]) => Value::obs(Obs::Spot {
            company: string(s)?.to_string(),
        }),
        (Prim::Const, [Value::Double(x)]) => Value::obs(Obs::Const(*x)),
        (Prim::Const, [v]) => return Err(bad("Double", v)),
        (Prim::ObsAt, [o, d]) => Value::Double(obs(o)?.sample(date(d)?, prices)?),
        (Prim::Concat, [a, b]) => Value::str(&format!("{}{}", string(a)?, string(b)?)),
        (Prim::IntToDouble, [Value::Int(n)]) => Value::Double(*n as f64),
        (Prim::IntToDouble, [v]) => return Err(bad("Int", v)),
        (Prim::DynObsMul, [x, y]) => {
            let x = obs(x)?;
            match y {
                Value::Contract(c) => Value::contract(Contract::Scale(x, c.clone())),
                Value::Obs(o) => Value::obs(Obs::Binary(ArithOp::Mul, x, o.clone())),
                other => return Err(bad("Contract or Obs Double", other)),
            }
        }
        (Prim::DynamicToType, [v]) => dynamic_to_type(v),
        (Prim::AnyToString, [v]) => Value::str(&v.render()),
        (Prim::Arith(op), [a, b]) => arith(op, a, b, blame).map_err(|e| e.unwrap_or_else(|| bad(&format!("operands of `{}`", op.symbol()), b)))?,
        (Prim::Compare(op), [a, b]) => match compare(a, b, op) {
            Some(r) => Value::bool(r),
            None => return Err(bad(a.tag().as_str(), b)),
        },
        (_, args) => unreachable!("{prim:?} applied to {} arguments", args.len()),
    })
}

/// `Err(None)` means the operand tags do not fit.
fn arith(op: ArithOp, a: &Value, b: &Value, blame: &Blame) -> Result<Value, Option<RuntimeError>> {
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => {
            let r = match op {
                ArithOp::Add => x.checked_add(*y),
                ArithOp::Sub => x.checked_sub(*y),
                ArithOp::Mul => x.checked_mul(*y),
                ArithOp::Div if *y == 0 => return Err(Some(RuntimeError::DivisionByZero(blame.clone()))),
                ArithOp::Div => x.checked_div(*y),
            };
            r.map(Value::Int).ok_or_else(|| Some(RuntimeError::Overflow(blame.clone())))
        }
        (Value::Double(x), Value::Double(y)) => Ok(Value::Double(op.apply(*x, *y))),
        (Value::Obs(x), Value::Obs(y)) => Ok(Value::obs(Obs::Binary(op, x.clone(), y.clone()))),
        _ => Err(None),
    }
}

fn compare(a: &Value, b: &Value, op: CompareOp) -> Option<bool> {
    let ord = match (a, b) {
        (Value::Int(x), Value::Int(y)) => x.partial_cmp(y),
        (Value::Double(x), Value::Double(y)) => x.partial_cmp(y),
        (Value::Str(x), Value::Str(y)) => x.partial_cmp(y),
        (Value::Date(x), Value::Date(y)) => x.partial_cmp(y),
        (Value::Currency(x), Value::Currency(y)) => x.partial_cmp(y),
        _ if op == CompareOp::Eq && std::mem::discriminant(a) == std::mem::discriminant(b) => {
            return Some(a == b);
        }
        _ => return None,
    };
    Some(match op {
        CompareOp::Eq => ord == Some(Ordering::Equal),
        CompareOp::Lt => ord == Some(Ordering::Less),
        CompareOp::Le => matches!(ord, Some(Ordering::Less | Ordering::Equal)),
        CompareOp::Gt => ord == Some(Ordering::Greater),
        CompareOp::Ge => matches!(ord, Some(Ordering::Greater | Ordering::Equal)),
    })
}
