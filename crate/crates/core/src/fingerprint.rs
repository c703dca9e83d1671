//! 64-bit FNV-1a hashing over a canonical byte encoding.
//!
//! Used to stamp solver results with the identity of the problem they
//! were computed for, so stale results are rejected instead of silently
//! mixed. Floats are fed as little-endian IEEE 754 bits of their f64
//! widening, which makes the stamp exact rather than format-dependent.

pub(crate) struct Fnv64 {
    state: u64,
}

impl Fnv64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;

    pub(crate) fn new() -> Self {
        Fnv64 {
            state: Self::OFFSET,
        }
    }

    pub(crate) fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.state ^= u64::from(b);
            self.state = self.state.wrapping_mul(Self::PRIME);
        }
    }

    pub(crate) fn write_u8(&mut self, v: u8) {
        self.write(&[v]);
    }

    pub(crate) fn write_u64(&mut self, v: u64) {
        self.write(&v.to_le_bytes());
    }

    pub(crate) fn write_f64(&mut self, v: f64) {
        self.write(&v.to_bits().to_le_bytes());
    }

    /// Strings are written with a trailing NUL so that consecutive
    /// fields cannot alias ("ab" + "c" differs from "a" + "bc").
    pub(crate) fn write_str(&mut self, s: &str) {
        self.write(s.as_bytes());
        self.write_u8(0);
    }

    pub(crate) fn finish(&self) -> u64 {
        self.state
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_published_fnv1a_vectors() {
        let mut h = Fnv64::new();
        h.write(b"");
        assert_eq!(h.finish(), 0xcbf2_9ce4_8422_2325);
        let mut h = Fnv64::new();
        h.write(b"a");
        assert_eq!(h.finish(), 0xaf63_dc4c_8601_ec8c);
        let mut h = Fnv64::new();
        h.write(b"foobar");
        assert_eq!(h.finish(), 0x85944171f73967e8);
    }

    #[test]
    fn string_framing_prevents_field_aliasing() {
        let mut h1 = Fnv64::new();
        h1.write_str("ab");
        h1.write_str("c");
        let mut h2 = Fnv64::new();
        h2.write_str("a");
        h2.write_str("bc");
        assert_ne!(h1.finish(), h2.finish());
    }
}
