//! Recursive-descent Pratt parser for the expression grammar.
//!
//! Grammar (whitespace-insensitive, ASCII only):
//!
//! ```text
//! expr    := term (('+' | '-') term)*          left associative
//! term    := unary (('*' | '/') unary)*        left associative
//! unary   := '-' unary | power
//! power   := atom ('^' exponent)?              right associative, binds
//!                                              tighter than unary minus
//! atom    := number | 'x' | 'y' | 'z' | 'pi'
//!          | ('sin'|'cos'|'exp'|'sqrt') '(' expr ')'
//!          | '(' expr ')'
//! ```
//!
//! Exponents must fold to a constant integer so that differentiation stays
//! total; `x^(-2)` and `x^(1+1)` are accepted, `x^y` is not. Errors carry
//! the byte offset and the tokens that would have been accepted.

use crate::chart::Var;
use crate::scalar::Scalar;

use super::{BinaryOp, Expression, UnaryOp};

/// Parse failure with byte-offset diagnostics.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: found {found}, expected {expected}")]
    Syntax {
        offset: usize,
        found: String,
        expected: &'static str,
    },
    #[error("unknown identifier `{name}` at byte {offset}; known identifiers are x, y, z, pi and the functions sin, cos, exp, sqrt")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("exponent at byte {offset} must fold to a constant integer")]
    NonIntegerExponent { offset: usize },
    #[error("numeric literal at byte {offset} is out of range")]
    ConstantOverflow { offset: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number `{v}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Spanned {
    tok: Tok,
    offset: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let start = i;
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
            }
            b'+' => {
                toks.push(Spanned { tok: Tok::Plus, offset: start });
                i += 1;
            }
            b'-' => {
                toks.push(Spanned { tok: Tok::Minus, offset: start });
                i += 1;
            }
            b'*' => {
                toks.push(Spanned { tok: Tok::Star, offset: start });
                i += 1;
            }
            b'/' => {
                toks.push(Spanned { tok: Tok::Slash, offset: start });
                i += 1;
            }
            b'^' => {
                toks.push(Spanned { tok: Tok::Caret, offset: start });
                i += 1;
            }
            b'(' => {
                toks.push(Spanned { tok: Tok::LParen, offset: start });
                i += 1;
            }
            b')' => {
                toks.push(Spanned { tok: Tok::RParen, offset: start });
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| ParseError::Syntax {
                    offset: start,
                    found: format!("`{text}`"),
                    expected: "a numeric literal",
                })?;
                if !v.is_finite() {
                    return Err(ParseError::ConstantOverflow { offset: start });
                }
                toks.push(Spanned { tok: Tok::Num(v), offset: start });
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push(Spanned {
                    tok: Tok::Ident(src[start..i].to_string()),
                    offset: start,
                });
            }
            _ => {
                return Err(ParseError::Syntax {
                    offset: start,
                    found: if c.is_ascii() {
                        format!("'{}'", c as char)
                    } else {
                        format!("non-ASCII byte 0x{c:02x}")
                    },
                    expected: "a number, identifier, operator or parenthesis",
                });
            }
        }
    }
    toks.push(Spanned { tok: Tok::Eof, offset: src.len() });
    Ok(toks)
}

// Binding powers. `^` is right associative (rbp equals lbp); unary minus
// sits between '*' and '^' so `-x^2` is `-(x^2)` while `x^-2` still parses.
const BP_ADD: (u8, u8) = (10, 11);
const BP_MUL: (u8, u8) = (20, 21);
const BP_UNARY: u8 = 25;
const BP_POW: (u8, u8) = (30, 30);

const MAX_ABS_EXPONENT: f64 = 1_000_000.0;

struct Parser<T> {
    toks: Vec<Spanned>,
    pos: usize,
    _marker: std::marker::PhantomData<T>,
}

impl<T: Scalar> Parser<T> {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> &Spanned {
        let s = &self.toks[self.pos];
        self.pos += 1;
        s
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        let s = self.bump();
        if s.tok == Tok::RParen {
            Ok(())
        } else {
            Err(ParseError::Syntax {
                offset: s.offset,
                found: s.tok.describe(),
                expected: "')'",
            })
        }
    }

    fn atom(&mut self) -> Result<Expression<T>, ParseError> {
        let offset = self.peek().offset;
        match self.bump().tok.clone() {
            Tok::Num(v) => match T::from_f64(v) {
                Some(c) if c.is_finite() => Ok(Expression::constant(c)),
                _ => Err(ParseError::ConstantOverflow { offset }),
            },
            Tok::Ident(name) => match name.as_str() {
                "x" | "y" | "z" => Ok(Expression::var(Var::from_name(&name).unwrap())),
                "pi" => Ok(Expression::constant(T::PI())),
                "sin" | "cos" | "exp" | "sqrt" => {
                    let op = match name.as_str() {
                        "sin" => UnaryOp::Sin,
                        "cos" => UnaryOp::Cos,
                        "exp" => UnaryOp::Exp,
                        _ => UnaryOp::Sqrt,
                    };
                    let open = self.bump();
                    if open.tok != Tok::LParen {
                        return Err(ParseError::Syntax {
                            offset: open.offset,
                            found: open.tok.describe(),
                            expected: "'(' (functions require parentheses)",
                        });
                    }
                    let arg = self.expr(0)?;
                    self.expect_rparen()?;
                    Ok(Expression::raw_unary(op, arg))
                }
                _ => Err(ParseError::UnknownIdentifier { offset, name }),
            },
            Tok::Minus => {
                let operand = self.expr(BP_UNARY)?;
                Ok(Expression::raw_unary(UnaryOp::Neg, operand))
            }
            Tok::LParen => {
                let inner = self.expr(0)?;
                self.expect_rparen()?;
                Ok(inner)
            }
            tok => Err(ParseError::Syntax {
                offset,
                found: tok.describe(),
                expected: "an expression: number, x, y, z, pi, function call, '(' or '-'",
            }),
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expression<T>, ParseError> {
        let mut lhs = self.atom()?;
        loop {
            let (tok, offset) = (self.peek().tok.clone(), self.peek().offset);
            let (op, (lbp, rbp)) = match tok {
                Tok::Plus => (Some(BinaryOp::Add), BP_ADD),
                Tok::Minus => (Some(BinaryOp::Sub), BP_ADD),
                Tok::Star => (Some(BinaryOp::Mul), BP_MUL),
                Tok::Slash => (Some(BinaryOp::Div), BP_MUL),
                Tok::Caret => (None, BP_POW),
                _ => break,
            };
            if lbp < min_bp {
                break;
            }
            self.bump();
            let rhs = self.expr(rbp)?;
            lhs = match op {
                Some(op) => Expression::raw_binary(op, lhs, rhs),
                None => {
                    let n = integer_exponent(&rhs)
                        .ok_or(ParseError::NonIntegerExponent { offset })?;
                    Expression::raw_pow(lhs, n)
                }
            };
        }
        Ok(lhs)
    }
}

fn integer_exponent<T: Scalar>(e: &Expression<T>) -> Option<i32> {
    let v = e.fold_constant()?.to_f64()?;
    if !v.is_finite() || v.abs() > MAX_ABS_EXPONENT {
        return None;
    }
    let n = v.round();
    if (v - n).abs() > 1e-9 {
        return None;
    }
    Some(n as i32)
}

/// Parses an expression from text. See the module docs for the grammar.
pub fn parse<T: Scalar>(text: &str) -> Result<Expression<T>, ParseError> {
    let toks = lex(text)?;
    let mut parser = Parser::<T> {
        toks,
        pos: 0,
        _marker: std::marker::PhantomData,
    };
    let e = parser.expr(0)?;
    let end = parser.bump();
    if end.tok == Tok::Eof {
        Ok(e)
    } else {
        Err(ParseError::Syntax {
            offset: end.offset,
            found: end.tok.describe(),
            expected: "end of input or a binary operator",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Point;

    type E = Expression<f64>;

    #[test]
    fn parses_cos_of_product() {
        let e: E = parse("cos(2*z)").unwrap();
        let expected = E::raw_unary(
            UnaryOp::Cos,
            E::raw_binary(BinaryOp::Mul, E::constant(2.0), E::var(Var::Z)),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn multiplication_is_left_associative() {
        let e: E = parse("x*y*z").unwrap();
        let expected = E::raw_binary(
            BinaryOp::Mul,
            E::raw_binary(BinaryOp::Mul, E::var(Var::X), E::var(Var::Y)),
            E::var(Var::Z),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn unknown_identifiers_are_rejected() {
        match parse::<f64>("dz + q") {
            Err(ParseError::UnknownIdentifier { offset, name }) => {
                assert_eq!(offset, 0);
                assert_eq!(name, "dz");
            }
            other => panic!("expected unknown-identifier error, got {other:?}"),
        }
    }

    #[test]
    fn precedence_and_unary_minus() {
        // ^ binds tighter than unary minus: -x^2 == -(x^2)
        let e: E = parse("-x^2").unwrap();
        assert_eq!(e.evaluate(&Point::new(3.0, 0.0, 0.0)).unwrap(), -9.0);

        // right associativity: 2^3^2 == 2^(3^2)
        let e: E = parse("2^3^2").unwrap();
        assert_eq!(e.evaluate(&Point::origin()).unwrap(), 512.0);

        // 1 + 2*3 = 7, (1+2)*3 = 9
        let e: E = parse("1 + 2*3").unwrap();
        assert_eq!(e.evaluate(&Point::origin()).unwrap(), 7.0);
        let e: E = parse("(1 + 2)*3").unwrap();
        assert_eq!(e.evaluate(&Point::origin()).unwrap(), 9.0);
    }

    #[test]
    fn negative_and_folded_exponents() {
        let e: E = parse("x^-2").unwrap();
        assert_eq!(e.evaluate(&Point::new(2.0, 0.0, 0.0)).unwrap(), 0.25);
        let e: E = parse("x^(1+1)").unwrap();
        assert_eq!(e.evaluate(&Point::new(3.0, 0.0, 0.0)).unwrap(), 9.0);
        match parse::<f64>("x^y") {
            Err(ParseError::NonIntegerExponent { offset }) => assert_eq!(offset, 1),
            other => panic!("expected non-integer-exponent error, got {other:?}"),
        }
    }

    #[test]
    fn pi_is_recognised() {
        let e: E = parse("cos(pi)").unwrap();
        assert!((e.evaluate(&Point::origin()).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        match parse::<f64>("x + ") {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("{other:?}"),
        }
        match parse::<f64>("sin x") {
            Err(ParseError::Syntax { offset, expected, .. }) => {
                assert_eq!(offset, 4);
                assert!(expected.contains("parentheses"));
            }
            other => panic!("{other:?}"),
        }
        match parse::<f64>("(x + y") {
            Err(ParseError::Syntax { offset, expected, .. }) => {
                assert_eq!(offset, 6);
                assert_eq!(expected, "')'");
            }
            other => panic!("{other:?}"),
        }
        match parse::<f64>("") {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 0),
            other => panic!("{other:?}"),
        }
        match parse::<f64>("x y") {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn whitespace_is_insignificant() {
        let a: E = parse("x*y + sin( z )").unwrap();
        let b: E = parse("x * y+sin(z)").unwrap();
        assert_eq!(a, b);
    }
}
