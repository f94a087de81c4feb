//! Random well-typed terms, built from a coherence's own context by a
//! sequence of operation codes.

use std::sync::Arc;

use icatt_core::builders::{comp2, id, id_head, ucomp, Typed};
use icatt_core::elaborate::Elaborator;
use icatt_core::inverse::witness_vars;
use icatt_core::kernel::Decl;
use icatt_core::ps::PsTree;
use icatt_core::syntax::{CohHead, Context, Destructor, Term, Type};

/// A cell, with an invertibility witness for it when one is known.
#[derive(Clone, Debug)]
pub struct Cell {
    pub cell: Typed,
    pub witness: Option<Term>,
}

impl Cell {
    /// The type of the witness.
    pub fn witness_type(&self) -> Type {
        Type::inv(self.cell.ty.clone(), self.cell.tm.clone())
    }
}

#[derive(Clone, Debug)]
pub struct Pool {
    pub ctx: Context,
    pub cells: Vec<Cell>,
}

impl Pool {
    pub fn new(head: &Arc<CohHead>) -> Pool {
        let ctx = head.ctx.clone();
        let mut cells: Vec<Cell> = (0..ctx.len())
            .map(|x| Cell {
                cell: Typed::var(&ctx, x),
                witness: None,
            })
            .collect();
        let generic = head.generic();
        let witness = witness_vars(head)
            .is_empty()
            .then(|| Term::can(generic.clone(), vec![]));
        cells.push(Cell {
            cell: Typed::new(generic, head.ty.clone()),
            witness,
        });
        Pool { ctx, cells }
    }

    fn witnessed(&self) -> Vec<usize> {
        (0..self.cells.len())
            .filter(|&i| self.cells[i].witness.is_some())
            .collect()
    }

    /// Applies one operation; codes that do not apply are skipped.
    pub fn step(&mut self, code: u32) {
        let kind = code % 7;
        let pick = (code / 7) as usize;
        let witnessed = self.witnessed();
        let any = pick % self.cells.len();
        match kind {
            0 | 1 if !witnessed.is_empty() => {
                let c = self.cells[witnessed[pick % witnessed.len()]].clone();
                let w = c.witness.unwrap();
                let (b, u, v) = c.cell.ty.boundary().unwrap();
                let d = if kind == 0 {
                    Destructor::LInv
                } else {
                    Destructor::RInv
                };
                let rev = Type::arr(b.clone(), v.clone(), u.clone());
                self.cells.push(Cell {
                    cell: Typed::new(Term::destr(d, w), rev),
                    witness: None,
                });
            }
            2 | 3 if !witnessed.is_empty() => {
                let c = self.cells[witnessed[pick % witnessed.len()]].clone();
                let w = c.witness.clone().unwrap();
                let (unit, wit) = if kind == 2 {
                    (Destructor::LUnit, Destructor::LWit)
                } else {
                    (Destructor::RUnit, Destructor::RWit)
                };
                let ty =
                    icatt_core::builders::destructor_type(unit, &w, &c.witness_type()).unwrap();
                self.cells.push(Cell {
                    cell: Typed::new(Term::destr(unit, w.clone()), ty),
                    witness: Some(Term::destr(wit, w)),
                });
            }
            4 => {
                let c = self.cells[any].cell.clone();
                let i = id(&c);
                let w = Term::can(i.tm.clone(), vec![]);
                self.cells.push(Cell {
                    cell: i,
                    witness: Some(w),
                });
            }
            5 | 6 => {
                let a = self.cells[any].clone();
                if a.cell.dim() < 1 {
                    return;
                }
                let fits = |b: &Typed| {
                    b.dim() == a.cell.dim()
                        && b.base() == a.cell.base()
                        && if kind == 5 {
                            b.src() == a.cell.tgt()
                        } else {
                            b.tgt() == a.cell.src()
                        }
                };
                let partners: Vec<usize> = (0..self.cells.len())
                    .filter(|&j| fits(&self.cells[j].cell))
                    .collect();
                if partners.is_empty() {
                    return;
                }
                let b = self.cells[partners[pick % partners.len()]].clone();
                let (first, second) = if kind == 5 { (&a, &b) } else { (&b, &a) };
                let cell = comp2(&first.cell, &second.cell);
                let witness = match (&first.witness, &second.witness) {
                    (Some(x), Some(y)) => {
                        Some(Term::can(cell.tm.clone(), vec![x.clone(), y.clone()]))
                    }
                    _ => None,
                };
                self.cells.push(Cell { cell, witness });
            }
            _ => {}
        }
    }

    pub fn last(&self) -> &Cell {
        self.cells.last().unwrap()
    }
}

/// Runs `codes` from the generic instance of `head`.
pub fn build(head: &Arc<CohHead>, codes: &[u32]) -> Pool {
    let mut p = Pool::new(head);
    for &c in codes {
        p.step(c);
    }
    p
}

/// The coherences of an environment plus a few unbiased composites and an
/// identity, as starting points for [`build`].
pub fn heads(el: &Elaborator) -> Vec<Arc<CohHead>> {
    let mut out: Vec<_> = el
        .env
        .iter()
        .filter_map(|(_, d)| match d {
            Decl::Coh(h) => Some(h.clone()),
            _ => None,
        })
        .collect();
    for tree in [
        PsTree::chain(2, 0),
        PsTree::chain(3, 0),
        PsTree::chain(2, 1),
        PsTree::disk(2),
    ] {
        if let Term::Coh(h, _) = ucomp(&tree).tm {
            out.push(h);
        }
    }
    out.push(id_head(1));
    out
}
