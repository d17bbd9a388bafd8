//! Recursive-descent parser for the expression DSL.
//!
//! Grammar:
//!   expr   := term (('+'|'-') term)*
//!   term   := factor (('*'|'/') factor)*
//!   factor := ['-'] atom ('^' ['-'] int)*
//!   atom   := number | 'n' | 'x_' digits | 'sqrt(' expr ')'
//!           | 'root(' expr ',' int ')' | 'floor(' expr ')'
//!           | 'frac(' expr ')' | '(' expr ')'
//!
//! Division requires a constant divisor (generalised polynomials are not
//! closed under division) and folds to multiplication by the inverse.
//! Constant subtrees fold to a single `Const` node.

use super::GenPoly;
use crate::error::{Error, Result};
use crate::scalar::parse::Cursor;
use crate::scalar::ExactScalar;

pub fn parse(text: &str) -> Result<GenPoly> {
    let mut cur = Cursor::new(text);
    let g = expr(&mut cur)?;
    cur.skip_ws();
    if cur.pos != cur.text.len() {
        return Err(cur.err("trailing input"));
    }
    Ok(g)
}

fn expr(cur: &mut Cursor) -> Result<GenPoly> {
    let mut acc = term(cur)?;
    loop {
        if cur.eat(b'+') {
            acc = acc.add2(term(cur)?);
        } else if cur.eat(b'-') {
            acc = acc.sub2(term(cur)?);
        } else {
            return Ok(acc);
        }
    }
}

fn term(cur: &mut Cursor) -> Result<GenPoly> {
    let mut acc = factor(cur)?;
    loop {
        if cur.eat(b'*') {
            acc = acc.mul2(factor(cur)?);
        } else if cur.eat(b'/') {
            let pos = cur.pos;
            let divisor = factor(cur)?;
            let GenPoly::Const(c) = divisor else {
                return Err(Error::SyntaxError {
                    offset: pos,
                    message: "division requires a constant divisor".into(),
                });
            };
            if c.is_zero() {
                return Err(Error::SyntaxError {
                    offset: pos,
                    message: "division by zero".into(),
                });
            }
            let inv = ExactScalar::one().div(&c).expect("nonzero divisor");
            acc = acc.mul2(GenPoly::Const(inv));
        } else {
            return Ok(acc);
        }
    }
}

fn factor(cur: &mut Cursor) -> Result<GenPoly> {
    if cur.eat(b'-') {
        let inner = factor(cur)?;
        return Ok(match inner {
            GenPoly::Const(c) => GenPoly::Const(c.neg()),
            other => other.negate(),
        });
    }
    let mut base = atom(cur)?;
    while cur.eat(b'^') {
        let pos = cur.pos;
        let neg = cur.eat(b'-');
        let e = cur.integer()?;
        let e: i64 = e.try_into().map_err(|_| Error::SyntaxError {
            offset: pos,
            message: "exponent too large".into(),
        })?;
        let e = if neg { -e } else { e };
        base = match (&base, e) {
            (GenPoly::Const(c), _) => GenPoly::Const(c.pow_i(e).map_err(|_| {
                Error::SyntaxError {
                    offset: pos,
                    message: "cannot invert zero".into(),
                }
            })?),
            (_, e) if e >= 1 => GenPoly::pow_of(base, e as u32),
            _ => {
                return Err(Error::SyntaxError {
                    offset: pos,
                    message: "non-constant bases need a positive integer exponent".into(),
                })
            }
        };
    }
    Ok(base)
}

fn atom(cur: &mut Cursor) -> Result<GenPoly> {
    match cur.peek() {
        Some(b'(') => {
            cur.bump();
            let g = expr(cur)?;
            cur.expect(b')')?;
            Ok(g)
        }
        Some(b'n') => {
            cur.bump();
            // Reject identifiers like `nu`
            if matches!(cur.text.get(cur.pos), Some(c) if c.is_ascii_alphanumeric() || *c == b'_')
            {
                return Err(ident_error(cur));
            }
            Ok(GenPoly::n())
        }
        Some(b'x') => {
            let start = cur.pos;
            cur.bump();
            if !cur.eat(b'_') {
                cur.pos = start;
                return Err(ident_error(cur));
            }
            let idx = cur.integer()?;
            let idx: usize = idx.try_into().map_err(|_| Error::UnknownVariable(
                "variable index too large".into(),
            ))?;
            if idx == 0 {
                return Err(Error::UnknownVariable("x_0".into()));
            }
            Ok(GenPoly::var(idx - 1))
        }
        Some(b'f') if cur.eat_keyword("floor") => {
            cur.expect(b'(')?;
            let g = expr(cur)?;
            cur.expect(b')')?;
            Ok(GenPoly::floor_of(g))
        }
        Some(b'f') if cur.eat_keyword("frac") => {
            cur.expect(b'(')?;
            let g = expr(cur)?;
            cur.expect(b')')?;
            Ok(GenPoly::frac_of(g))
        }
        Some(b's') if cur.eat_keyword("sqrt") => {
            cur.expect(b'(')?;
            let g = expr(cur)?;
            cur.expect(b')')?;
            let c = const_arg(cur, g, "sqrt")?;
            Ok(GenPoly::Const(c.nth_root(2)?))
        }
        Some(b'r') if cur.eat_keyword("root") => {
            cur.expect(b'(')?;
            let g = expr(cur)?;
            cur.expect(b',')?;
            let n = cur.integer()?;
            cur.expect(b')')?;
            let c = const_arg(cur, g, "root")?;
            let n: u32 = n
                .try_into()
                .map_err(|_| cur.err("root order too large"))?;
            if n == 0 {
                return Err(cur.err("root order must be positive"));
            }
            Ok(GenPoly::Const(c.nth_root(n)?))
        }
        Some(c) if c.is_ascii_digit() => Ok(GenPoly::Const(ExactScalar::from_rational(
            cur.number()?,
        ))),
        Some(c) if c.is_ascii_alphabetic() => Err(ident_error(cur)),
        _ => Err(cur.err("expected an expression atom")),
    }
}

fn const_arg(cur: &Cursor, g: GenPoly, what: &str) -> Result<ExactScalar> {
    match g {
        GenPoly::Const(c) => Ok(c),
        _ => Err(cur.err(&format!("{what} argument must be constant"))),
    }
}

fn ident_error(cur: &mut Cursor) -> Error {
    let start = cur.pos;
    let mut end = start;
    while end < cur.text.len()
        && (cur.text[end].is_ascii_alphanumeric() || cur.text[end] == b'_')
    {
        end += 1;
    }
    let name = String::from_utf8_lossy(&cur.text[start..end]).to_string();
    if name.is_empty() {
        cur.err("expected an expression atom")
    } else {
        Error::UnknownVariable(name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::DEFAULT_MAX_BITS;

    #[test]
    fn parses_frac_sqrt2_n() {
        // "frac(sqrt(2)*n)" -> Frac(Mul(sqrt 2, n))
        let g = parse("frac(sqrt(2)*n)").unwrap();
        match &g {
            GenPoly::Frac(inner) => match inner.as_ref() {
                GenPoly::Mul(ch) => {
                    assert_eq!(ch.len(), 2);
                    assert!(matches!(ch[0], GenPoly::Const(_)));
                    assert!(matches!(ch[1], GenPoly::Var(0)));
                }
                other => panic!("unexpected inner {other:?}"),
            },
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parses_mixed_expression() {
        let g = parse("n*frac(n/3) - floor(n/2)").unwrap();
        // spot-check a value: n=7: 7*{7/3} - floor(7/2) = 7/3 - 3 = -2/3
        assert_eq!(
            g.eval_at_int(7, DEFAULT_MAX_BITS).unwrap(),
            crate::scalar::ExactScalar::ratio(-2, 3)
        );
    }

    #[test]
    fn syntax_error_carries_offset() {
        match parse("frac(") {
            Err(Error::SyntaxError { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_variable_is_reported() {
        assert!(matches!(
            parse("2*m + 1"),
            Err(Error::UnknownVariable(name)) if name == "m"
        ));
        assert!(matches!(
            parse("x_0 + 1"),
            Err(Error::UnknownVariable(name)) if name == "x_0"
        ));
    }

    #[test]
    fn division_by_variable_is_rejected() {
        assert!(matches!(
            parse("1/n"),
            Err(Error::SyntaxError { .. })
        ));
    }

    #[test]
    fn roundtrip_reparse_is_structural_identity() {
        let samples = [
            "frac(sqrt(2)*n)",
            "n*frac(n/3) - floor(n/2)",
            "x_1*x_2^3 + frac(x_2 - 1/2)",
            "floor((n + 1/2)^2) - 7",
            "frac(n*(1 + sqrt(5))/2)",
        ];
        for s in samples {
            let g = parse(s).unwrap();
            let text = g.unparse();
            let h = parse(&text).unwrap();
            assert_eq!(g, h, "roundtrip failed: {s} -> {text}");
        }
    }
}
