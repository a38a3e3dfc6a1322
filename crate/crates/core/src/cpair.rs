//! Serde adapters encoding complex scalars as two-element `[re, im]` arrays.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub fn serialize<S: Serializer>(c: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    [c.re, c.im].serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
    let [re, im] = <[f64; 2]>::deserialize(d)?;
    if !re.is_finite() || !im.is_finite() {
        return Err(D::Error::custom("complex components must be finite"));
    }
    Ok(Complex64::new(re, im))
}

/// `[[a,b],[c,d]]` as nested `[re, im]` pairs, row-major.
pub mod matrix2 {
    use super::*;

    type Raw = [[[f64; 2]; 2]; 2];

    pub fn serialize<S: Serializer>(m: &[[Complex64; 2]; 2], s: S) -> Result<S::Ok, S::Error> {
        let raw: Raw = [
            [[m[0][0].re, m[0][0].im], [m[0][1].re, m[0][1].im]],
            [[m[1][0].re, m[1][0].im], [m[1][1].re, m[1][1].im]],
        ];
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[[Complex64; 2]; 2], D::Error> {
        let raw = Raw::deserialize(d)?;
        let mut m = [[Complex64::default(); 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                if !raw[r][c][0].is_finite() || !raw[r][c][1].is_finite() {
                    return Err(D::Error::custom("complex components must be finite"));
                }
                m[r][c] = Complex64::new(raw[r][c][0], raw[r][c][1]);
            }
        }
        Ok(m)
    }
}

/// A fixed-length list of complex scalars as `[re, im]` pairs.
pub mod array {
    use super::*;

    pub fn serialize<S: Serializer, const N: usize>(
        v: &[Complex64; N],
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let raw: Vec<[f64; 2]> = v.iter().map(|c| [c.re, c.im]).collect();
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(
        d: D,
    ) -> Result<[Complex64; N], D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        if raw.len() != N {
            return Err(D::Error::custom(format!("expected {N} complex entries")));
        }
        let mut out = [Complex64::default(); N];
        for (k, p) in raw.iter().enumerate() {
            if !p[0].is_finite() || !p[1].is_finite() {
                return Err(D::Error::custom("complex components must be finite"));
            }
            out[k] = Complex64::new(p[0], p[1]);
        }
        Ok(out)
    }
}
