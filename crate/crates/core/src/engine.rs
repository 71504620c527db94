//! Work-stack realization of the recursive "simulate a partner at the jump
//! time" procedure shared by the weighted and the Maxwellian samplers.
//!
//! Each frame owns one pending call `value(horizon)`. A jump at time `s`
//! pushes a child frame with horizon `s` and stream `parent.derive(j)` where
//! `j` counts the parent's jumps; when the child returns, the parent consumes
//! the partner state and continues its clock.

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::tree::OrderedTree;

pub(crate) trait JumpProcess {
    type State: Copy;

    fn initial(&self, rng: &mut RngStream) -> Self::State;
    /// Total jump rate in the given state.
    fn rate(&self, state: &Self::State) -> f64;
    fn jump(&self, state: Self::State, partner: Self::State, rng: &mut RngStream) -> Self::State;
}

pub(crate) struct Outcome<S> {
    pub state: S,
    pub n: u64,
    pub tree: OrderedTree,
}

struct Frame<S> {
    horizon: f64,
    clock: f64,
    state: S,
    stream: RngStream,
    jumps: u64,
    n: u64,
    // preorder codes of partner trees, oldest first
    partners: String,
}

impl<S> Frame<S> {
    fn into_code(self) -> String {
        // left comb: `jumps` internal nodes on the spine, then the initial
        // leaf, then each partner subtree in order
        let mut code = String::with_capacity(self.jumps as usize + 1 + self.partners.len());
        code.extend(std::iter::repeat_n('1', self.jumps as usize));
        code.push('0');
        code.push_str(&self.partners);
        code
    }
}

fn start<P: JumpProcess>(process: &P, horizon: f64, mut stream: RngStream) -> Frame<P::State> {
    let state = process.initial(&mut stream);
    Frame { horizon, clock: 0.0, state, stream, jumps: 0, n: 0, partners: String::new() }
}

/// Runs the recursive sampler up to time `t`. Fails with `CapExceeded` as
/// soon as the total number of recursive calls would exceed `cap`.
pub(crate) fn run<P: JumpProcess>(process: &P, t: f64, stream: RngStream, cap: u64) -> Result<Outcome<P::State>> {
    let mut stack = vec![start(process, t, stream)];
    let mut calls = 0u64;
    loop {
        let top = stack.last_mut().expect("stack is never empty here");
        if top.clock < top.horizon {
            let rate = process.rate(&top.state);
            top.clock += top.stream.exp(rate);
            if top.clock < top.horizon {
                calls += 1;
                if calls > cap {
                    return Err(Error::CapExceeded { cap });
                }
                let child = top.stream.derive(top.jumps);
                let horizon = top.clock;
                stack.push(start(process, horizon, child));
                continue;
            }
        }
        let done = stack.pop().expect("nonempty");
        let (state, n) = (done.state, done.n);
        let code = done.into_code();
        match stack.last_mut() {
            None => {
                return Ok(Outcome { state, n, tree: OrderedTree::from_code_unchecked(code) });
            }
            Some(parent) => {
                parent.state = process.jump(parent.state, state, &mut parent.stream);
                parent.n += n + 1;
                parent.jumps += 1;
                parent.partners.push_str(&code);
            }
        }
    }
}
