//! Reduction to sorted form: on every circle all tails precede all heads.

use crate::diagram::{End, EndpointRef, GaussDiagram};
use crate::moves::{apply_tah, Crossing, MoveError, MoveInstance, MoveTrace, Origin};

#[derive(Clone, Debug)]
pub struct Sorted {
    pub diagram: GaussDiagram,
    pub trace: MoveTrace,
}

fn first_self_arrow_on(d: &GaussDiagram, c: usize) -> Option<usize> {
    d.circle(c)
        .iter()
        .find(|e| e.end == End::Tail && d.arrow(e.arrow).is_self_arrow())
        .map(|e| e.arrow)
}

fn first_inversion(d: &GaussDiagram, c: usize) -> Option<usize> {
    d.circle(c)
        .windows(2)
        .find(|w| w[0].end == End::Head && w[1].end == End::Tail)
        .map(|w| w[1].arrow)
}

/// An arrow pair with opposite signs, consecutive heads and tails joined by
/// a stretch of tails; returns the tail that walks and the one it walks to.
fn cancelling_pair(d: &GaussDiagram) -> Option<(usize, usize)> {
    for circle in d.circles() {
        let len = circle.len();
        for p in 0..len {
            let (h1, h2) = (circle[p], circle[(p + 1) % len]);
            if len < 2 || h1.end != End::Head || h2.end != End::Head || h1.arrow == h2.arrow {
                continue;
            }
            let (a, b) = (h1.arrow, h2.arrow);
            if d.arrow(a).sign == d.arrow(b).sign {
                continue;
            }
            for (x, y) in [(a, b), (b, a)] {
                let (c, q) = d.locate(EndpointRef::tail(x));
                let tc = d.circle(c);
                let joined = (1..tc.len())
                    .map(|k| tc[(q + k) % tc.len()])
                    .take_while(|e| e.end == End::Tail)
                    .any(|e| e.arrow == y);
                if joined {
                    return Some((x, y));
                }
            }
        }
    }
    None
}

/// Walks tails past each other until an R2 pair is exposed, then removes it.
fn cancel_pairs(trace: &mut MoveTrace) -> Result<(), MoveError> {
    while let Some((x, y)) = cancelling_pair(trace.final_diagram()) {
        let cur = trace.final_diagram();
        let next = cur.next_on_circle(cur.locate(EndpointRef::tail(x)));
        let m = if next.arrow == y {
            MoveInstance::R2Del { first: x, second: y }
        } else {
            MoveInstance::Oc { first: x, second: next.arrow }
        };
        trace.push(m, Origin::Primitive)?;
    }
    Ok(())
}

/// Sorts `d` up to SV. Circles are handled in order: self-arrows are
/// erased, then tails are pulled backward across heads until the circle
/// has a single run of tails. Each crossing only creates endpoints on
/// other circles (neither arrow at the site can be a self-arrow), so the
/// head-before-tail pairs of the current circle strictly decrease. A final
/// pass erases self-arrows created on other circles and rotates each
/// basepoint to the start of the tail run. Cancelling R2 pairs are removed
/// after every crossing; this only deletes endpoints or permutes tails, so
/// it never adds a head-before-tail pair.
pub fn sort_diagram(d: &GaussDiagram) -> Result<Sorted, MoveError> {
    let mut trace = MoveTrace::new(d.clone());
    for c in 0..d.n() {
        loop {
            let cur = trace.final_diagram().clone();
            if let Some(a) = first_self_arrow_on(&cur, c) {
                trace.push(MoveInstance::SvDel { arrow: a }, Origin::Primitive)?;
                continue;
            }
            if cur.is_circle_sorted(c) {
                break;
            }
            let x = first_inversion(&cur, c).expect("an unsorted circle has a head followed by a tail");
            trace.extend(apply_tah(&cur, x, Crossing::Backward)?);
            cancel_pairs(&mut trace)?;
        }
    }
    loop {
        let cur = trace.final_diagram().clone();
        match (0..cur.arrow_count()).find(|&a| cur.arrow(a).is_self_arrow()) {
            Some(a) => {
                trace.push(MoveInstance::SvDel { arrow: a }, Origin::Primitive)?;
            }
            None => break,
        }
    }
    for c in 0..d.n() {
        let cur = trace.final_diagram().clone();
        let circle = cur.circle(c);
        let len = circle.len();
        let start = (0..len).find(|&p| circle[p].end == End::Tail && circle[(p + len - 1) % len].end == End::Head);
        if let Some(shift) = start.filter(|&s| s != 0) {
            trace.push(MoveInstance::Rebase { circle: c, shift }, Origin::Primitive)?;
        }
    }
    Ok(Sorted { diagram: trace.final_diagram().clone(), trace })
}

/// True when every circle reads tails first, then heads, from its basepoint.
pub fn is_linearly_sorted(d: &GaussDiagram) -> bool {
    (0..d.n()).all(|c| {
        let circle = d.circle(c);
        circle.windows(2).all(|w| !(w[0].end == End::Head && w[1].end == End::Tail))
    })
}

/// Arrows of a sorted diagram grouped by the circle carrying their head,
/// in order along that circle.
pub fn heads_in_order(d: &GaussDiagram, c: usize) -> Vec<EndpointRef> {
    d.circle(c).iter().copied().filter(|e| e.end == End::Head).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_gauss_code;

    fn g(s: &str) -> GaussDiagram {
        parse_gauss_code(s).unwrap()
    }

    #[test]
    fn hopf_is_rebased() {
        let s = sort_diagram(&g("t1 h2+ / h1+ t2")).unwrap();
        assert_eq!(s.diagram.to_gauss_code(), "t1 h2+ / t2 h1+");
        assert!(s.trace.verify().is_ok());
        assert!(s.trace.steps.iter().all(|st| st.instance.kind().is_none()));
    }

    #[test]
    fn sorted_input_is_untouched() {
        let d = g("t1 t2 / h1+ / h2-");
        let s = sort_diagram(&d).unwrap();
        assert_eq!(s.diagram, d);
        assert!(s.trace.is_empty());
    }

    #[test]
    fn kinks_are_erased() {
        let s = sort_diagram(&g("h1+ t1 t2 h2- / ")).unwrap();
        assert_eq!(s.diagram, GaussDiagram::unlink(2));
    }

    #[test]
    fn crossings_are_inserted_and_result_sorted() {
        let d = g("t1 h2+ t3 / h1- t2 h3+");
        let s = sort_diagram(&d).unwrap();
        assert!(s.diagram.is_sorted());
        assert!(is_linearly_sorted(&s.diagram));
        assert!(s.trace.verify().is_ok());
        assert!(s.diagram.arrow_count() >= d.arrow_count());
        let heads = heads_in_order(&s.diagram, 0);
        assert!(heads.iter().all(|e| e.end == End::Head));
    }
}
