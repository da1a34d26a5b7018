use latmn::lattice::{hermite_normal_form, kernel_lattice_basis, lattice_member, rank};
use latmn::scalar::axpy;
use latmn::IntMatrix;
use proptest::prelude::*;

fn small_matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=4, 1usize..=6).prop_flat_map(|(m, n)| {
        prop::collection::vec(prop::collection::vec(-3i64..=3, n), m)
            .prop_map(|rows| IntMatrix::from_rows(&rows).unwrap())
    })
}

proptest! {
    #[test]
    fn hermite_decomposition_is_exact(a in small_matrix()) {
        let dec = hermite_normal_form(&a).unwrap();
        prop_assert_eq!(dec.u.mul(&a).unwrap(), dec.h.clone());
        prop_assert_eq!(dec.u.determinant().unwrap().abs(), 1);
        prop_assert_eq!(dec.rank(), rank(&a).unwrap());
        // The form of a matrix already in normal form is itself.
        prop_assert_eq!(hermite_normal_form(&dec.h).unwrap().h, dec.h);
    }

    #[test]
    fn kernel_basis_is_independent_and_complete(a in small_matrix()) {
        let basis = kernel_lattice_basis(&a).unwrap();
        prop_assert_eq!(basis.len(), a.cols() - rank(&a).unwrap());
        for v in basis.moves() {
            prop_assert!(a.annihilates(v).unwrap());
        }
        if !basis.is_empty() {
            let b = IntMatrix::from_rows(basis.moves()).unwrap();
            prop_assert_eq!(rank(&b).unwrap(), basis.len());
        }
    }

    #[test]
    fn integer_combinations_are_members(a in small_matrix(), coeffs in prop::collection::vec(-4i64..=4, 6)) {
        let basis = kernel_lattice_basis(&a).unwrap();
        let mut v = vec![0i64; a.cols()];
        for (c, b) in coeffs.iter().zip(basis.moves()) {
            v = axpy(&v, *c, b).unwrap();
        }
        let got = lattice_member(&basis, &v).unwrap().expect("combination must be a member");
        prop_assert_eq!(&got[..], &coeffs[..basis.len()]);
    }
}
