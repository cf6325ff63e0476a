//! Path reconstruction from any oracle: follow the stored first hop, checking
//! each step against the oracle, and fall back to scanning out-edges when the
//! hop does not check out.

use crate::error::{DsoError, Result};
use crate::graph::{dist_add, Dist, Vertex, WeightedDigraph, NONE};
use crate::reference::QueryAnswer;
use crate::sparse::Oracle;
use crate::trace::Trace;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recovered {
    pub answer: QueryAnswer,
    /// `s` to `t` avoiding `f`, for finite answers.
    pub path: Option<Vec<Vertex>>,
    /// Oracle queries spent, the first one included.
    pub queries: u32,
}

pub fn recover_path(o: &(impl Oracle + ?Sized), g: &WeightedDigraph, s: Vertex, t: Vertex, f: Vertex) -> Result<Recovered> {
    let (answer, first) = o.query_traced(s, t, f, &mut Trace::default())?;
    let mut queries = 1;
    let QueryAnswer::Finite(total) = answer else {
        return Ok(Recovered { answer, path: None, queries });
    };
    let mut ask = |c: Vertex| -> Result<(Option<Dist>, Vertex)> {
        queries += 1;
        let (a, e) = o.query_traced(c, t, f, &mut Trace::default())?;
        Ok((a.dist(), e.next))
    };
    let (mut cur, mut left, mut guess) = (s, total, first.next);
    let mut path = vec![s];
    while cur != t {
        if path.len() > 2 * g.n() + 1 {
            return Err(DsoError::Internal(format!("reconstruction of ({s}, {t}, {f}) does not terminate")));
        }
        let fits = |c: Vertex, d: Option<Dist>| -> bool {
            match (g.weight(cur, c), d) {
                (Some(w), Some(d)) => dist_add(w, d) == left,
                _ => false,
            }
        };
        let mut step = None;
        if guess != NONE && guess != f && g.weight(cur, guess).is_some() {
            let (d, next) = ask(guess)?;
            if fits(guess, d) {
                step = Some((guess, d.unwrap_or_default(), next));
            }
        }
        if step.is_none() {
            for e in g.out_edges(cur) {
                if e.head == f || e.head == guess {
                    continue;
                }
                let (d, next) = ask(e.head)?;
                if fits(e.head, d) {
                    step = Some((e.head, d.unwrap_or_default(), next));
                    break;
                }
            }
        }
        let (c, d, next) = step.ok_or_else(|| DsoError::Internal(format!("reconstruction of ({s}, {t}, {f}) stalls at {cur}")))?;
        path.push(c);
        (cur, left, guess) = (c, d, next);
    }
    Ok(Recovered { answer, path: Some(path), queries })
}
