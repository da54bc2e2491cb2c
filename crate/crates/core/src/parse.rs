//! Gauss-code text format.
//!
//! Circles are separated by `/`; within a circle, whitespace-separated
//! tokens `t<k>` (tail of arrow k) and `h<k>+` / `h<k>-` (head of arrow k
//! with the arrow's sign). The first token of a circle sits at its basepoint.
//! A tail may repeat its arrow's sign (`t3-`) as long as it agrees with the head.

use std::collections::HashMap;

use thiserror::Error;

use crate::diagram::{DiagramError, End, GaussDiagram, RawDiagram, Sign};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

impl ParseError {
    pub fn syntax(position: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax { position, message: message.into() }
    }
}

pub fn parse_gauss_code(text: &str) -> Result<GaussDiagram, ParseError> {
    let mut raw = RawDiagram::default();
    let mut tail_signs: HashMap<usize, (Sign, usize)> = HashMap::new();
    let mut circle = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        if b.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if b == b'/' {
            raw.circles.push(std::mem::take(&mut circle));
            i += 1;
            continue;
        }
        let start = i;
        let end = match b {
            b't' | b'T' => End::Tail,
            b'h' | b'H' => End::Head,
            _ => return Err(ParseError::syntax(i, format!("unexpected character {:?}", b as char))),
        };
        i += 1;
        let digits = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if digits == i {
            return Err(ParseError::syntax(i, "expected an arrow number"));
        }
        let id: usize = text[digits..i]
            .parse()
            .map_err(|_| ParseError::syntax(digits, "arrow number too large"))?;
        if id == 0 {
            return Err(ParseError::syntax(digits, "arrow numbers start at 1"));
        }
        let sign = match bytes.get(i) {
            Some(b'+') => {
                i += 1;
                Some(Sign::Pos)
            }
            Some(b'-') => {
                i += 1;
                Some(Sign::Neg)
            }
            _ => None,
        };
        if let Some(&next) = bytes.get(i) {
            if !next.is_ascii_whitespace() && next != b'/' {
                return Err(ParseError::syntax(i, format!("unexpected character {:?}", next as char)));
            }
        }
        match (end, sign) {
            (End::Head, None) => {
                return Err(ParseError::syntax(i, format!("head h{id} needs a sign")));
            }
            (End::Head, Some(s)) => {
                if raw.signs.insert(id, s).is_some() {
                    return Err(DiagramError::DuplicateHead(id).into());
                }
            }
            (End::Tail, Some(s)) => {
                tail_signs.insert(id, (s, start));
            }
            (End::Tail, None) => {}
        }
        circle.push((id, end));
    }
    raw.circles.push(circle);
    for (id, (s, _)) in &tail_signs {
        if let Some(h) = raw.signs.get(id) {
            if h != s {
                return Err(DiagramError::InconsistentSign(*id).into());
            }
        }
    }
    let (d, _) = GaussDiagram::from_raw(&raw)?;
    Ok(d)
}

pub fn serialize_gauss_code(d: &GaussDiagram) -> String {
    d.to_gauss_code()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hopf_code() {
        let d = parse_gauss_code("t1 h2+ / h1+ t2").unwrap();
        assert_eq!(d.n(), 2);
        assert_eq!(d.arrow_count(), 2);
        assert_eq!(d.arrow(0).tail_circle, 0);
        assert_eq!(d.arrow(0).head_circle, 1);
        assert!(d.arrows().iter().all(|a| a.sign == Sign::Pos));
        assert_eq!(serialize_gauss_code(&d), "t1 h2+ / h1+ t2");
    }

    #[test]
    fn empty_circles() {
        let d = parse_gauss_code("/").unwrap();
        assert_eq!(d.n(), 2);
        assert_eq!(d.arrow_count(), 0);
        assert_eq!(serialize_gauss_code(&d), "/");
        assert_eq!(parse_gauss_code("").unwrap().n(), 1);
        let d = parse_gauss_code("t1 h1+ / / ").unwrap();
        assert_eq!(d.n(), 3);
        assert_eq!(serialize_gauss_code(&d), "t1 h1+ / /");
    }

    #[test]
    fn kink_is_accepted() {
        let d = parse_gauss_code("t1 h1+").unwrap();
        assert_eq!(d.n(), 1);
        assert!(d.arrow(0).is_self_arrow());
        assert_eq!(serialize_gauss_code(&d), "t1 h1+");
    }

    #[test]
    fn ids_are_renumbered() {
        let d = parse_gauss_code("h7- t3 / t7 h3+").unwrap();
        assert_eq!(serialize_gauss_code(&d), "h1- t2 / t1 h2+");
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_gauss_code("t1 x2"), Err(ParseError::Syntax { position: 3, .. })));
        assert!(matches!(parse_gauss_code("t1 h1"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_gauss_code("t1"), Err(ParseError::Diagram(DiagramError::MissingHead(1)))));
        assert!(matches!(parse_gauss_code("h1+"), Err(ParseError::Diagram(DiagramError::MissingTail(1)))));
        assert!(matches!(
            parse_gauss_code("t1 t1 h1+"),
            Err(ParseError::Diagram(DiagramError::DuplicateTail(1)))
        ));
        assert!(matches!(
            parse_gauss_code("t1 h1+ h1-"),
            Err(ParseError::Diagram(DiagramError::DuplicateHead(1)))
        ));
        assert!(matches!(
            parse_gauss_code("t1- h1+"),
            Err(ParseError::Diagram(DiagramError::InconsistentSign(1)))
        ));
        assert!(parse_gauss_code("t1+ h1+").is_ok());
        assert!(matches!(parse_gauss_code("t0 h0+"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_gauss_code("t1h1+"), Err(ParseError::Syntax { .. })));
    }
}
