//! Compact textual descriptions of test functions, characters and numbers.
//!
//! Each expression is stored verbatim so that configs round-trip unchanged, and
//! parsed on demand into the core types.
//!
//! Grammar (terms joined by `+`, each with an optional `c*` coefficient):
//! - radial test functions: `gaussian-log(center,width)`, `bump(center,radius)`,
//!   `interval(a,b)` (smooth bump on `|u| ∈ [a,b]`), `window(y_min,y_max)`, `zero`;
//! - locally constant functions: `units`, `integers`, `shell(m)`,
//!   `ball(center,r)` with a rational center, `zero`;
//! - characters: `quadratic`, `root-power(level,k)`, `two-adic(level,sign,k)`;
//! - adelic archimedean factors: `gaussian`, `theta-s0`, `g(b)`, `xg(b)`.

use adele_core::adelic_summation::{ArchimedeanFactor, GaussTerm};
use adele_core::local_field::{rational, LocallyConstantFn, PAdicBall};
use adele_core::test_functions::{FiniteCharacter, RadialTestFn};
use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Splits `s` on top-level `+` (outside parentheses).
fn split_terms(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if ch == '+' && depth == 0 {
            out.push(cur.trim().to_string());
            cur.clear();
        } else {
            cur.push(ch);
        }
    }
    out.push(cur.trim().to_string());
    out.into_iter().filter(|t| !t.is_empty()).collect()
}

/// `coef*name(args)` → `(coef, name, args)`.
fn parse_call(term: &str) -> Result<(Option<String>, String, Vec<String>)> {
    let (coef, rest) = match term.find('*') {
        Some(i) if !term[..i].contains('(') => (Some(term[..i].trim().to_string()), term[i + 1..].trim()),
        _ => (None, term.trim()),
    };
    let (name, args) = match rest.find('(') {
        Some(i) => {
            let inner = rest[i + 1..].strip_suffix(')').ok_or_else(|| anyhow!("missing ')' in `{term}`"))?;
            (rest[..i].trim().to_string(), inner.split(',').map(|a| a.trim().to_string()).collect())
        }
        None => (rest.to_string(), Vec::new()),
    };
    Ok((coef, name, args))
}

fn float(s: &str) -> Result<f64> {
    s.parse::<f64>().with_context(|| format!("`{s}` is not a number"))
}

fn args_f64<const N: usize>(name: &str, args: &[String]) -> Result<[f64; N]> {
    if args.len() != N {
        bail!("`{name}` takes {N} arguments, got {}", args.len());
    }
    let mut out = [0.0; N];
    for (o, a) in out.iter_mut().zip(args) {
        *o = float(a)?;
    }
    Ok(out)
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().with_context(|| format!("bad numerator in `{s}`"))?;
            let d: i64 = d.trim().parse().with_context(|| format!("bad denominator in `{s}`"))?;
            if d == 0 {
                bail!("zero denominator in `{s}`");
            }
            Ok(rational::frac(n, d))
        }
        None => Ok(rational::int(s.parse().with_context(|| format!("`{s}` is not a rational number"))?)),
    }
}

pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    Complex64::from_str(&t).map_err(|_| anyhow!("`{s}` is not a complex number (use forms like 0.5+2i)"))
}

macro_rules! string_expr {
    ($name:ident, $check:expr) => {
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub struct $name(String);

        impl TryFrom<String> for $name {
            type Error = anyhow::Error;
            fn try_from(s: String) -> Result<Self> {
                let expr = $name(s);
                let check: fn(&$name) -> Result<()> = $check;
                check(&expr)?;
                Ok(expr)
            }
        }

        impl From<$name> for String {
            fn from(s: $name) -> String {
                s.0
            }
        }

        impl FromStr for $name {
            type Err = anyhow::Error;
            fn from_str(s: &str) -> Result<Self> {
                $name::try_from(s.to_string())
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

string_expr!(RadialExpr, |s| s.build().map(|_| ()));
string_expr!(LcfExpr, |s| s.build(2).map(|_| ()));
string_expr!(CharExpr, |s| s.build().map(|_| ()));
string_expr!(ArchExpr, |s| s.build().map(|_| ()));
string_expr!(FactorExpr, |s| s.build().map(|_| ()));
string_expr!(ComplexExpr, |s| s.value().map(|_| ()));
string_expr!(TermExpr, |s| s.value().map(|_| ()));

impl RadialExpr {
    pub fn build(&self) -> Result<RadialTestFn> {
        let mut h = RadialTestFn::zero();
        for term in split_terms(&self.0) {
            let (coef, name, args) = parse_call(&term)?;
            let c = coef.as_deref().map(float).transpose()?.unwrap_or(1.0);
            let piece = match name.as_str() {
                "zero" => RadialTestFn::zero(),
                "gaussian-log" => {
                    let [a, b] = args_f64::<2>(&name, &args)?;
                    RadialTestFn::gaussian_log(a, b)?
                }
                "bump" => {
                    let [a, b] = args_f64::<2>(&name, &args)?;
                    RadialTestFn::bump(a, b)?
                }
                "interval" => {
                    let [a, b] = args_f64::<2>(&name, &args)?;
                    RadialTestFn::bump_on_module_interval(a, b)?
                }
                "window" => {
                    let [a, b] = args_f64::<2>(&name, &args)?;
                    RadialTestFn::window(a, b)?
                }
                other => bail!("unknown radial test function `{other}`"),
            };
            h = h.add(&piece.scale(c));
        }
        Ok(h)
    }
}

impl LcfExpr {
    pub fn build(&self, p: u64) -> Result<LocallyConstantFn> {
        let mut f = LocallyConstantFn::zero(p);
        for term in split_terms(&self.0) {
            let (coef, name, args) = parse_call(&term)?;
            let c = coef.as_deref().map(parse_rational).transpose()?.unwrap_or_else(|| rational::int(1));
            let piece = match name.as_str() {
                "zero" => LocallyConstantFn::zero(p),
                "units" => LocallyConstantFn::units(p)?,
                "integers" => LocallyConstantFn::integers(p)?,
                "shell" => {
                    let m: i64 = args.first().ok_or_else(|| anyhow!("`shell` needs an exponent"))?.parse()?;
                    LocallyConstantFn::shell(p, m)?
                }
                "ball" => {
                    if args.len() != 2 {
                        bail!("`ball` takes a center and a radius exponent");
                    }
                    let r: i64 = args[1].parse()?;
                    LocallyConstantFn::indicator(PAdicBall::new(p, &parse_rational(&args[0])?, r)?)
                }
                other => bail!("unknown locally constant function `{other}`"),
            };
            f = f.add(&piece.scale(&c))?;
        }
        Ok(f)
    }
}

impl CharExpr {
    /// Parses `p:expr`.
    pub fn build(&self) -> Result<(u64, FiniteCharacter)> {
        let (p, rest) = self.0.split_once(':').ok_or_else(|| anyhow!("characters are written `p:expr`, got `{}`", self.0))?;
        let p: u64 = p.trim().parse()?;
        let (_, name, args) = parse_call(rest)?;
        let ints = |n: usize| -> Result<Vec<i64>> {
            if args.len() != n {
                bail!("`{name}` takes {n} arguments");
            }
            args.iter().map(|a| a.parse::<i64>().map_err(Into::into)).collect()
        };
        let chi = match name.as_str() {
            "quadratic" => FiniteCharacter::quadratic(p)?,
            "root-power" => {
                let v = ints(2)?;
                FiniteCharacter::primitive_root_power(p, v[0] as u32, v[1])?
            }
            "two-adic" => {
                if p != 2 {
                    bail!("`two-adic` characters live at p = 2");
                }
                let v = ints(3)?;
                FiniteCharacter::two_adic(v[0] as u32, v[1] as u32, v[2])?
            }
            other => bail!("unknown character `{other}`"),
        };
        Ok((p, chi))
    }
}

impl ArchExpr {
    pub fn build(&self) -> Result<ArchimedeanFactor> {
        let mut terms = Vec::new();
        for term in split_terms(&self.0) {
            let (coef, name, args) = parse_call(&term)?;
            let c = coef.as_deref().map(float).transpose()?.unwrap_or(1.0);
            let scaled = |f: ArchimedeanFactor| f.terms.into_iter().map(move |t| GaussTerm { coeff: t.coeff * c, ..t });
            match name.as_str() {
                "gaussian" => terms.extend(scaled(ArchimedeanFactor::gaussian())),
                "theta-s0" => terms.extend(scaled(ArchimedeanFactor::theta_s0())),
                "g" => terms.push(GaussTerm::even(c, args_f64::<1>(&name, &args)?[0])),
                "xg" => terms.push(GaussTerm::odd(c, args_f64::<1>(&name, &args)?[0])),
                other => bail!("unknown archimedean factor `{other}`"),
            }
        }
        Ok(ArchimedeanFactor::new(terms)?)
    }
}

impl FactorExpr {
    /// Parses `p:lcf`.
    pub fn build(&self) -> Result<LocallyConstantFn> {
        let (p, rest) = self.0.split_once(':').ok_or_else(|| anyhow!("finite factors are written `p:expr`, got `{}`", self.0))?;
        let p: u64 = p.trim().parse()?;
        LcfExpr(rest.to_string()).build(p)
    }
}

impl ComplexExpr {
    pub fn value(&self) -> Result<Complex64> {
        parse_complex(&self.0)
    }
}

impl TermExpr {
    /// Parses `k:coefficient`.
    pub fn value(&self) -> Result<(i64, Complex64)> {
        let (k, c) = self.0.split_once(':').ok_or_else(|| anyhow!("sequence terms are written `k:coefficient`, got `{}`", self.0))?;
        Ok((k.trim().parse()?, parse_complex(c)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_and_lcf_exprs() {
        let h: RadialExpr = "2*gaussian-log(0,1) + interval(0.5,2)".parse().unwrap();
        let built = h.build().unwrap();
        assert_eq!(built.terms().len(), 2);
        let f: LcfExpr = "units + 1/2*shell(1) + ball(1/3,2)".parse().unwrap();
        assert_eq!(f.build(3).unwrap().eval(&rational::int(1)), rational::int(1));
        assert!("nonsense(1)".parse::<RadialExpr>().is_err());
        assert!("shell".parse::<LcfExpr>().is_err());
    }

    #[test]
    fn character_and_number_exprs() {
        let (p, chi) = "2:two-adic(2,1,0)".parse::<CharExpr>().unwrap().build().unwrap();
        assert_eq!((p, chi.conductor_exponent()), (2, 2));
        assert_eq!("0.5+2i".parse::<ComplexExpr>().unwrap().value().unwrap(), Complex64::new(0.5, 2.0));
        assert_eq!("-1:0.5".parse::<TermExpr>().unwrap().value().unwrap(), (-1, Complex64::new(0.5, 0.0)));
        let arch = "theta-s0".parse::<ArchExpr>().unwrap().build().unwrap();
        assert_eq!(arch.terms.len(), 3);
    }
}
