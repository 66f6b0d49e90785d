//! Parameter values that are either fixed or drawn from a range at apply time.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::StreamRng;

/// A fixed value, or an inclusive `[min, max]` range resolved by one draw when the node runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Sampled<T> {
    Fixed(T),
    Range([T; 2]),
}

impl<T: Copy> From<T> for Sampled<T> {
    fn from(v: T) -> Self {
        Sampled::Fixed(v)
    }
}

pub trait Drawable: Copy + PartialOrd + std::fmt::Display {
    fn draw(lo: Self, hi: Self, rng: &mut StreamRng) -> Self;
}

impl Drawable for f64 {
    fn draw(lo: f64, hi: f64, rng: &mut StreamRng) -> f64 {
        rng.range_f64(lo, hi)
    }
}

impl Drawable for u32 {
    fn draw(lo: u32, hi: u32, rng: &mut StreamRng) -> u32 {
        rng.range_i64(lo as i64, hi as i64) as u32
    }
}

impl Drawable for i32 {
    fn draw(lo: i32, hi: i32, rng: &mut StreamRng) -> i32 {
        rng.range_i64(lo as i64, hi as i64) as i32
    }
}

impl Drawable for u8 {
    fn draw(lo: u8, hi: u8, rng: &mut StreamRng) -> u8 {
        rng.range_i64(lo as i64, hi as i64) as u8
    }
}

impl<T: Drawable> Sampled<T> {
    /// The fixed value. Unresolved ranges read as their lower bound.
    pub fn value(&self) -> T {
        match *self {
            Sampled::Fixed(v) => v,
            Sampled::Range([lo, _]) => lo,
        }
    }

    pub fn resolve(&self, rng: &mut StreamRng) -> Sampled<T> {
        match *self {
            Sampled::Fixed(v) => Sampled::Fixed(v),
            Sampled::Range([lo, hi]) => Sampled::Fixed(T::draw(lo, hi, rng)),
        }
    }

    /// Checks both ends against `[min, max]` and that ranges are ordered.
    pub fn check(&self, kind: &str, field: &str, min: T, max: T) -> Result<()> {
        let (lo, hi) = match *self {
            Sampled::Fixed(v) => (v, v),
            Sampled::Range([lo, hi]) => (lo, hi),
        };
        if lo.partial_cmp(&hi).is_none_or(|o| o.is_gt()) {
            return Err(Error::param(kind, field, format!("range [{lo}, {hi}] is reversed")));
        }
        if !(lo >= min && hi <= max) {
            return Err(Error::param(kind, field, format!("must lie in [{min}, {max}]")));
        }
        Ok(())
    }
}
