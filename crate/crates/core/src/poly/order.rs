use std::cmp::Ordering;

use super::monomial::Monomial;

/// Monomial orders. Variable 0 is the greatest variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    Lex,
    Grevlex,
    /// Ordered partition of the variables; earlier blocks dominate, each block
    /// is compared by graded reverse lexicographic order along its listed
    /// variables. Every variable of the ring must be listed exactly once.
    Block(Vec<Vec<usize>>),
}

impl MonomialOrder {
    /// Block order with `first` as the greatest block and the remaining
    /// variables of a ring with `nvars` variables as the second block.
    pub fn elimination(first: &[usize], nvars: usize) -> Self {
        let rest: Vec<usize> = (0..nvars).filter(|v| !first.contains(v)).collect();
        let mut blocks = Vec::new();
        if !first.is_empty() {
            blocks.push(first.to_vec());
        }
        if !rest.is_empty() {
            blocks.push(rest);
        }
        MonomialOrder::Block(blocks)
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::Lex => a.lex_cmp(b),
            MonomialOrder::Grevlex => {
                match a.degree().cmp(&b.degree()) {
                    Ordering::Equal => {}
                    o => return o,
                }
                let n = a.width().max(b.width());
                for i in (0..n).rev() {
                    match a.exp(i).cmp(&b.exp(i)) {
                        Ordering::Equal => continue,
                        o => return o.reverse(),
                    }
                }
                Ordering::Equal
            }
            MonomialOrder::Block(blocks) => {
                for block in blocks {
                    let da: u32 = block.iter().map(|&v| a.exp(v)).sum();
                    let db: u32 = block.iter().map(|&v| b.exp(v)).sum();
                    if da != db {
                        return da.cmp(&db);
                    }
                    for &v in block.iter().rev() {
                        match a.exp(v).cmp(&b.exp(v)) {
                            Ordering::Equal => continue,
                            o => return o.reverse(),
                        }
                    }
                }
                Ordering::Equal
            }
        }
    }
}

/// How positions of a free module interact with the monomial order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PositionOrder {
    /// Position over term; position 0 is greatest.
    Pot,
    /// Term over position; ties broken with position 0 greatest.
    Top,
    /// Positions below the bound dominate every later position (compared
    /// POT among themselves); later positions are compared TOP.
    Split(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModuleOrder {
    pub mono: MonomialOrder,
    pub position: PositionOrder,
}

impl ModuleOrder {
    pub fn new(mono: MonomialOrder, position: PositionOrder) -> Self {
        ModuleOrder { mono, position }
    }

    #[inline]
    pub fn cmp(&self, a: (&Monomial, usize), b: (&Monomial, usize)) -> Ordering {
        let pos_cmp = b.1.cmp(&a.1);
        match self.position {
            PositionOrder::Pot => pos_cmp.then_with(|| self.mono.cmp(a.0, b.0)),
            PositionOrder::Top => self.mono.cmp(a.0, b.0).then(pos_cmp),
            PositionOrder::Split(head) => {
                let (ha, hb) = (a.1 < head, b.1 < head);
                match (ha, hb) {
                    (true, false) => Ordering::Greater,
                    (false, true) => Ordering::Less,
                    (true, true) => pos_cmp.then_with(|| self.mono.cmp(a.0, b.0)),
                    (false, false) => self.mono.cmp(a.0, b.0).then(pos_cmp),
                }
            }
        }
    }
}
