use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classes::{ClassFunction, ClassKey, ClassOptions, PairKind};
use crate::error::Result;
use crate::flows::{EdgeVector, FlowSpace};
use crate::graph::Digraph;
use crate::group::{Element, Group};

use super::preprocess::{preprocess, PreprocessOptions, Reduction};
use super::verify_certificate;

/// Budget for the cheap search for a NO certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScreenOptions {
    /// Random starting mappings per component.
    pub starts: usize,
    /// Local moves tried from each start.
    pub steps: usize,
    pub seed: u64,
}

impl Default for ScreenOptions {
    fn default() -> Self {
        ScreenOptions { starts: 4, steps: 300, seed: 0 }
    }
}

/// The digits a lane group may take in a canonical key.
struct Slot {
    lanes: Vec<usize>,
    values: Vec<Vec<Element>>,
}

fn slots(cf: &ClassFunction) -> Vec<Slot> {
    let g = cf.group();
    let mut owned = vec![false; cf.lane_count()];
    let mut out = Vec::new();
    for p in cf.pairs() {
        match p.kind {
            PairKind::Split { lane, .. } => {
                owned[lane] = true;
                out.push(Slot { lanes: vec![lane], values: g.nonzero().map(|d| vec![d]).collect() });
            }
            PairKind::Merged { lanes: [la, lb] } => {
                owned[la] = true;
                owned[lb] = true;
                let mut values = Vec::new();
                for da in g.elements() {
                    for db in g.elements() {
                        if g.signed(p.signs[0], da) != g.signed(p.signs[1], db) && db < cf.exchanged(p, da, db).1 {
                            values.push(vec![da, db]);
                        }
                    }
                }
                out.push(Slot { lanes: vec![la, lb], values });
            }
        }
    }
    for (lane, _) in owned.iter().enumerate().filter(|(_, &o)| !o) {
        out.push(Slot { lanes: vec![lane], values: g.elements().map(|d| vec![d]).collect() });
    }
    out
}

/// Flow spaces up to this size are listed in full and searched with
/// single-edge moves; larger ones fall back to descent over class keys.
pub const TABLE_MAX_FLOWS: u64 = 1 << 18;

/// Looks for a forbidden mapping without a satisfying flow by local search
/// from random starts. A hit proves that `g` is not connected; a miss
/// proves nothing.
pub fn screen(g: &Digraph, group: &Group, options: &ScreenOptions) -> Result<Option<EdgeVector>> {
    let reduced = preprocess(g, group, &PreprocessOptions::default());
    let components = match &reduced.reduction {
        Reduction::No(h) => return Ok(Some(h.clone())),
        Reduction::Components(c) => c,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    for (i, comp) in components.iter().enumerate() {
        let fs = FlowSpace::new(&comp.graph, group);
        let found = match fs.size() {
            Some(size) if size <= TABLE_MAX_FLOWS => tabu(&fs, options, &mut rng),
            _ => descent(&comp.graph, group, options, &mut rng)?,
        };
        if let Some(h) = found {
            let lifted = reduced.lift(i, &h);
            debug_assert!(verify_certificate(g, group, &lifted)?);
            return Ok(Some(lifted));
        }
    }
    Ok(None)
}

/// Tabu search over single-edge changes, scored by the exact number of
/// satisfying flows after the change.
fn tabu(fs: &FlowSpace, options: &ScreenOptions, rng: &mut ChaCha8Rng) -> Option<EdgeVector> {
    let g = fs.group();
    let k = g.order();
    let m = fs.graph().edge_count();
    if m == 0 {
        return None;
    }
    let mut flows: Vec<Element> = Vec::new();
    fs.for_each_flow(|f| {
        flows.extend_from_slice(f);
        false
    });
    let count = flows.len() / m;
    // Flows holding value v on edge e.
    let mut holding: Vec<Vec<u32>> = vec![Vec::new(); m * k];
    for (id, f) in flows.chunks(m).enumerate() {
        for (e, &v) in f.iter().enumerate() {
            holding[e * k + v as usize].push(id as u32);
        }
    }
    let tenure = (m / 4).max(2);
    let mut agree = vec![0u32; count];
    // Sum of agreeing edge ids, which names the edge when `agree` is one.
    let mut which = vec![0u32; count];
    let mut on_value = vec![0u32; m * k];
    let mut only = vec![0u32; m];
    let mut tabu_until = vec![0usize; m];
    for _ in 0..options.starts {
        let mut h: EdgeVector = (0..m).map(|_| rng.gen_range(0..k) as Element).collect();
        agree.fill(0);
        which.fill(0);
        for (e, &v) in h.iter().enumerate() {
            for &id in &holding[e * k + v as usize] {
                agree[id as usize] += 1;
                which[id as usize] += e as u32;
            }
        }
        tabu_until.fill(0);
        for step in 1..=options.steps {
            on_value.fill(0);
            only.fill(0);
            let mut satisfied = 0u32;
            for (id, f) in flows.chunks(m).enumerate() {
                match agree[id] {
                    0 => {
                        satisfied += 1;
                        for (e, &v) in f.iter().enumerate() {
                            on_value[e * k + v as usize] += 1;
                        }
                    }
                    1 => only[which[id] as usize] += 1,
                    _ => {}
                }
            }
            if satisfied == 0 {
                return Some(h);
            }
            let mut best = (u32::MAX, 0usize, 0 as Element);
            let mut ties = 0;
            for e in 0..m {
                if tabu_until[e] > step {
                    continue;
                }
                for v in 0..k {
                    if v == h[e] as usize {
                        continue;
                    }
                    let score = satisfied - on_value[e * k + v] + only[e];
                    if score < best.0 {
                        best = (score, e, v as Element);
                        ties = 1;
                    } else if score == best.0 {
                        ties += 1;
                        if rng.gen_range(0..ties) == 0 {
                            best = (score, e, v as Element);
                        }
                    }
                }
            }
            if best.0 == u32::MAX {
                break;
            }
            let (_, e, v) = best;
            for &id in &holding[e * k + h[e] as usize] {
                agree[id as usize] -= 1;
                which[id as usize] -= e as u32;
            }
            for &id in &holding[e * k + v as usize] {
                agree[id as usize] += 1;
                which[id as usize] += e as u32;
            }
            h[e] = v;
            tabu_until[e] = step + tenure;
        }
    }
    None
}

/// Random restarts and first-improvement descent over canonical class keys,
/// scored by counting satisfying flows.
fn descent(graph: &Digraph, group: &Group, options: &ScreenOptions, rng: &mut ChaCha8Rng) -> Result<Option<EdgeVector>> {
    let cf = ClassFunction::new(graph, group, ClassOptions::default())?;
    let fs = FlowSpace::with_spanning(graph, group, cf.spanning().clone());
    let slots = slots(&cf);
    let mut digits = vec![0 as Element; cf.lane_count()];
    let score = |digits: &[Element]| -> Result<(u64, EdgeVector)> {
        let h = cf.representative(ClassKey(cf.codec.encode(digits)))?;
        Ok((fs.count_satisfying(&h, u64::MAX)?, h))
    };
    for _ in 0..options.starts {
        for slot in &slots {
            let v = &slot.values[rng.gen_range(0..slot.values.len())];
            for (&l, &d) in slot.lanes.iter().zip(v) {
                digits[l] = d;
            }
        }
        let (mut best, mut h) = score(&digits)?;
        for _ in 0..options.steps {
            if best == 0 || slots.is_empty() {
                break;
            }
            let slot = &slots[rng.gen_range(0..slots.len())];
            let v = &slot.values[rng.gen_range(0..slot.values.len())];
            let old: Vec<Element> = slot.lanes.iter().map(|&l| digits[l]).collect();
            for (&l, &d) in slot.lanes.iter().zip(v) {
                digits[l] = d;
            }
            let (s, candidate) = score(&digits)?;
            if s <= best {
                best = s;
                h = candidate;
            } else {
                for (&l, &d) in slot.lanes.iter().zip(&old) {
                    digits[l] = d;
                }
            }
        }
        if best == 0 {
            return Ok(Some(h));
        }
    }
    Ok(None)
}
