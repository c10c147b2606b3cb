use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use crate::algebra::{int, rat, Monomial, Rational};
use crate::cohft::{four_point, solve_small_phase, three_point, x, FrobeniusData};

use super::{admissible, CorrelatorKey, DescendantError};

/// Chooses how the genus-zero recursion is applied to a correlator.
pub trait TrrChoice {
    /// For sorted insertions containing at least one `a >= 1`, returns the
    /// index of the insertion to lower and two further distinct indices for
    /// the fixed pair.
    fn choose(&mut self, insertions: &[(u32, u32)]) -> (usize, usize, usize);
}

/// Largest `a` (ties: smallest `m`, then first), fixed pair = the two
/// smallest remaining insertions.
#[derive(Clone, Copy, Debug, Default)]
pub struct DefaultChoice;

impl TrrChoice for DefaultChoice {
    fn choose(&mut self, insertions: &[(u32, u32)]) -> (usize, usize, usize) {
        let top = insertions.iter().map(|&(a, _)| a).max().expect("nonempty");
        let i = insertions.iter().position(|&(a, _)| a == top).expect("present");
        let mut rest = (0..insertions.len()).filter(|&k| k != i);
        let j = rest.next().expect("three insertions");
        let k = rest.next().expect("three insertions");
        (i, j, k)
    }
}

type Table = HashMap<Vec<(u32, u32)>, Rational>;

/// Memoized correlator evaluation for one `r`.
///
/// The tables sit behind `RwLock`s: lookups take a read lock, results are
/// inserted under a short write lock, and no lock is held while recursing.
pub struct Engine {
    r: u32,
    small: FrobeniusData,
    g0: RwLock<Table>,
    g1: RwLock<Table>,
}

enum Ctx<'a> {
    Shared,
    Local {
        choice: &'a mut dyn TrrChoice,
        g0: Table,
        g1: Table,
    },
}

impl Engine {
    pub fn new(r: u32) -> Result<Self, DescendantError> {
        if r < 2 {
            return Err(DescendantError::InvalidRank(r));
        }
        Ok(Engine {
            r,
            small: solve_small_phase(r)?,
            g0: RwLock::default(),
            g1: RwLock::default(),
        })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn small_phase(&self) -> &FrobeniusData {
        &self.small
    }

    /// Genus-zero correlator of the given insertions (any order).
    pub fn correlator_g0(&self, insertions: &[(u32, u32)]) -> Rational {
        self.g0(&sorted(insertions), &mut Ctx::Shared)
    }

    /// Same value computed with a caller-supplied recursion choice and a
    /// private memo table.
    pub fn correlator_g0_with(&self, insertions: &[(u32, u32)], choice: &mut dyn TrrChoice) -> Rational {
        let mut ctx = Ctx::Local {
            choice,
            g0: Table::new(),
            g1: Table::new(),
        };
        self.g0(&sorted(insertions), &mut ctx)
    }

    pub fn correlator_g1(&self, insertions: &[(u32, u32)]) -> Rational {
        self.g1(&sorted(insertions), &mut Ctx::Shared)
    }

    pub fn correlator_g1_with(&self, insertions: &[(u32, u32)], choice: &mut dyn TrrChoice) -> Rational {
        let mut ctx = Ctx::Local {
            choice,
            g0: Table::new(),
            g1: Table::new(),
        };
        self.g1(&sorted(insertions), &mut ctx)
    }

    pub(super) fn correlator_g0_checked(&self, key: &CorrelatorKey) -> Result<Rational, DescendantError> {
        self.check(key, 0)?;
        Ok(self.correlator_g0(key.insertions()))
    }

    pub(super) fn correlator_g1_checked(&self, key: &CorrelatorKey) -> Result<Rational, DescendantError> {
        self.check(key, 1)?;
        Ok(self.correlator_g1(key.insertions()))
    }

    fn check(&self, key: &CorrelatorKey, genus: u32) -> Result<(), DescendantError> {
        if key.genus() != genus {
            return Err(DescendantError::UnsupportedGenus(key.genus()));
        }
        if key.has_mu1() {
            return Err(DescendantError::Mu1Genus);
        }
        Ok(())
    }

    fn admissible(&self, genus: u32, insertions: &[(u32, u32)]) -> bool {
        if insertions.iter().any(|&(_, m)| m + 1 >= self.r) {
            return false;
        }
        let key = CorrelatorKey {
            r: self.r,
            genus,
            insertions: insertions.to_vec(),
            mu1: false,
        };
        admissible(&key).is_admissible()
    }

    fn primary(&self, ms: &[u32]) -> Rational {
        let r = self.r;
        match ms.len() {
            3 => three_point(r, ms[0], ms[1], ms[2]),
            4 => four_point(r, [ms[0], ms[1], ms[2], ms[3]]),
            n if n as u32 <= r + 1 => {
                let mono = Monomial::from_exponents(ms.iter().map(|&m| (x(m), 1)));
                self.small.potential().coeff(&mono) * mono.multiplicity_factorial()
            }
            _ => int(0),
        }
    }

    fn g0(&self, ins: &[(u32, u32)], ctx: &mut Ctx) -> Rational {
        if !self.admissible(0, ins) {
            return int(0);
        }
        if let Some(v) = lookup(&self.g0, ctx, 0, ins) {
            return v;
        }
        let value = if ins.iter().all(|&(a, _)| a == 0) {
            self.primary(&ins.iter().map(|&(_, m)| m).collect::<Vec<_>>())
        } else {
            self.trr0(ins, ctx)
        };
        store(&self.g0, ctx, 0, ins, value.clone());
        value
    }

    /// `⟨τ_{a+1,m} τ_j τ_k ∏_S⟩ = Σ ⟨τ_{a,m} ∏_{S1} τ_{0,m+}⟩ η^{m+m-} ⟨τ_{0,m-} τ_j τ_k ∏_{S2}⟩`.
    fn trr0(&self, ins: &[(u32, u32)], ctx: &mut Ctx) -> Rational {
        let r = self.r as i64;
        let (i, j, k) = match ctx {
            Ctx::Shared => DefaultChoice.choose(ins),
            Ctx::Local { choice, .. } => choice.choose(ins),
        };
        let (a, m) = ins[i];
        let lowered = (a - 1, m);
        let rest: Vec<(u32, u32)> = (0..ins.len())
            .filter(|&l| l != i && l != j && l != k)
            .map(|l| ins[l])
            .collect();
        let mut total = int(0);
        for mask in 0u64..(1 << rest.len()) {
            let (s1, s2): (Vec<_>, Vec<_>) = split(&rest, mask);
            if s1.is_empty() {
                continue;
            }
            let sum: i64 = m as i64 + s1.iter().map(|&(_, mm)| mm as i64).sum::<i64>();
            let mplus = (r - 2 - sum).rem_euclid(r);
            if mplus == r - 1 {
                continue;
            }
            let mminus = (r - 2 - mplus) as u32;
            let mut left = s1;
            left.push(lowered);
            left.push((0, mplus as u32));
            let mut right = s2;
            right.extend([(0, mminus), ins[j], ins[k]]);
            let lv = self.g0(&sorted(&left), ctx);
            if lv == int(0) {
                continue;
            }
            total += lv * self.g0(&sorted(&right), ctx);
        }
        total
    }

    fn g1(&self, ins: &[(u32, u32)], ctx: &mut Ctx) -> Rational {
        if !self.admissible(1, ins) {
            return int(0);
        }
        if let Some(v) = lookup(&self.g1, ctx, 1, ins) {
            return v;
        }
        // every genus-one primary violates the dimension constraint
        let value = if ins.iter().all(|&(a, _)| a == 0) {
            int(0)
        } else {
            self.trr1(ins, ctx)
        };
        store(&self.g1, ctx, 1, ins, value.clone());
        value
    }

    /// `⟨τ_{a+1,m} ∏_S⟩_1 = (1/24) Σ ⟨τ_{a,m} τ_{0,m+} τ_{0,m-} ∏_S⟩_0
    ///  + Σ ⟨τ_{a,m} ∏_{S1} τ_{0,m+}⟩_0 η^{m+m-} ⟨τ_{0,m-} ∏_{S2}⟩_1`.
    fn trr1(&self, ins: &[(u32, u32)], ctx: &mut Ctx) -> Rational {
        let r = self.r as i64;
        let i = match ctx {
            Ctx::Shared => DefaultChoice.choose_descendant(ins),
            Ctx::Local { choice, .. } => {
                if ins.len() >= 3 {
                    choice.choose(ins).0
                } else {
                    DefaultChoice.choose_descendant(ins)
                }
            }
        };
        let (a, m) = ins[i];
        let lowered = (a - 1, m);
        let rest: Vec<(u32, u32)> = (0..ins.len()).filter(|&l| l != i).map(|l| ins[l]).collect();
        let mut total = int(0);
        for mplus in 0..self.r - 1 {
            let mut cut = rest.clone();
            cut.extend([lowered, (0, mplus), (0, self.r - 2 - mplus)]);
            total += self.g0(&sorted(&cut), ctx) * rat(1, 24);
        }
        for mask in 0u64..(1 << rest.len()) {
            let (s1, s2) = split(&rest, mask);
            if s1.is_empty() {
                continue;
            }
            let sum: i64 = m as i64 + s1.iter().map(|&(_, mm)| mm as i64).sum::<i64>();
            let mplus = (r - 2 - sum).rem_euclid(r);
            if mplus == r - 1 {
                continue;
            }
            let mminus = (r - 2 - mplus) as u32;
            let mut left = s1;
            left.extend([lowered, (0, mplus as u32)]);
            let lv = self.g0(&sorted(&left), ctx);
            if lv == int(0) {
                continue;
            }
            let mut right = s2;
            right.push((0, mminus));
            total += lv * self.g1(&sorted(&right), ctx);
        }
        total
    }
}

impl DefaultChoice {
    fn choose_descendant(&self, insertions: &[(u32, u32)]) -> usize {
        let top = insertions.iter().map(|&(a, _)| a).max().expect("nonempty");
        insertions.iter().position(|&(a, _)| a == top).expect("present")
    }
}

fn lookup(shared: &RwLock<Table>, ctx: &Ctx, genus: u32, ins: &[(u32, u32)]) -> Option<Rational> {
    match ctx {
        Ctx::Shared => shared.read().expect("memo lock").get(ins).cloned(),
        Ctx::Local { g0, g1, .. } => if genus == 0 { g0 } else { g1 }.get(ins).cloned(),
    }
}

fn store(shared: &RwLock<Table>, ctx: &mut Ctx, genus: u32, ins: &[(u32, u32)], value: Rational) {
    match ctx {
        Ctx::Shared => {
            shared.write().expect("memo lock").insert(ins.to_vec(), value);
        }
        Ctx::Local { g0, g1, .. } => {
            if genus == 0 { g0 } else { g1 }.insert(ins.to_vec(), value);
        }
    }
}

fn sorted(ins: &[(u32, u32)]) -> Vec<(u32, u32)> {
    let mut v = ins.to_vec();
    v.sort_unstable();
    v
}

type Insertions = Vec<(u32, u32)>;

fn split(items: &[(u32, u32)], mask: u64) -> (Insertions, Insertions) {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (idx, &it) in items.iter().enumerate() {
        if mask >> idx & 1 == 1 {
            a.push(it);
        } else {
            b.push(it);
        }
    }
    (a, b)
}

/// Shared engine for `r`, created on first use.
pub fn engine(r: u32) -> Result<Arc<Engine>, DescendantError> {
    static ENGINES: OnceLock<Mutex<HashMap<u32, Arc<Engine>>>> = OnceLock::new();
    let registry = ENGINES.get_or_init(Default::default);
    if let Some(e) = registry.lock().expect("engine registry").get(&r) {
        return Ok(e.clone());
    }
    // solve outside the registry lock; a racing thread may build a duplicate
    let built = Arc::new(Engine::new(r)?);
    Ok(registry
        .lock()
        .expect("engine registry")
        .entry(r)
        .or_insert(built)
        .clone())
}
