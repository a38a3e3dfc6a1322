pub mod boundary;
pub mod cpair;
pub mod error;
pub mod jsonfmt;
pub mod ode;
pub mod oracle;
pub mod rk;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};

#[cfg(test)]
mod smoke {
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    #[test]
    fn complex_svd_works() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let m = DMatrix::from_row_slice(2, 4, &[
            one, i, one * 2.0, Complex64::new(0.0, 0.0),
            i, one, Complex64::new(3.0, -1.0), one,
        ]);
        let svd = m.clone().svd(true, true);
        assert_eq!(svd.singular_values.len(), 2);
        assert!(svd.singular_values[0] >= svd.singular_values[1]);
        // reconstruct
        let u = svd.u.unwrap();
        let vt = svd.v_t.unwrap();
        let mut s = DMatrix::zeros(2, 2);
        for k in 0..2 {
            s[(k, k)] = Complex64::new(svd.singular_values[k], 0.0);
        }
        let rec = &u * s * &vt;
        assert!((&rec - &m).norm() < 1e-12);
    }
}
