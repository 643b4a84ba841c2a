//! Fock-space operators against closed-form matrix elements.

use bogoliubov::corrections::f_vertex;
use bogoliubov::fock::{build_g0, build_g1_tilde, ground_state, FockBasis, ModeSet, ModeTables};
use bogoliubov::oracle::{pair_ground_energy, OracleSetup, OracleSpec, EIG_TOL};
use bogoliubov::quadratic::Coeffs;

/// With `tau = 0` the vacuum is the `G0` ground state and
/// `<p+q, -p, -q | G1~ | Omega> = 6 f(p, q) / sqrt(N)`.
#[test]
fn untwisted_three_particle_amplitude() {
    let setup = OracleSetup::new(&OracleSpec::default()).unwrap();
    let tables = setup.mode_tables.untwisted();
    let basis = FockBasis::new(setup.modes.clone(), 3, 1_000_000).unwrap();
    let g1 = build_g1_tilde(&basis, &tables);
    let mut vac = vec![0.0; basis.len()];
    vac[0] = 1.0;
    let amp = g1.matvec(&vac);

    let coeff = |n: [i32; 3]| -> Coeffs {
        let i = setup.model.lattice.index_of(&n).unwrap();
        Coeffs {
            st: 0.0,
            ct: 1.0,
            ..setup.tables.coeffs(&setup.model, i)
        }
    };
    let triples = [
        ([1, 0, 0], [0, 1, 0]),
        ([1, 0, 0], [0, 0, -1]),
        ([0, -1, 0], [0, 0, 1]),
    ];
    for (p, q) in triples {
        let s = [p[0] + q[0], p[1] + q[1], p[2] + q[2]];
        let f = f_vertex(&coeff(p), &coeff(q), &coeff(s));
        let mut occ = vec![0u8; setup.modes.len()];
        for n in [s, [-p[0], -p[1], -p[2]], [-q[0], -q[1], -q[2]]] {
            occ[setup.modes.index_of(&n).unwrap()] = 1;
        }
        let got = amp[basis.index_of(&occ).unwrap()];
        let expect = 6.0 * f / setup.model.n.sqrt();
        assert!(
            (got - expect).abs() <= 1e-12 * expect.abs(),
            "{got} {expect}"
        );
    }
}

#[test]
fn pair_energy_matches_closed_form() {
    for (f, g) in [(40.0, -3.0), (40.0, 12.0), (5.0, 2.0)] {
        let (energy, _) = pair_ground_energy(f, g, 40).unwrap();
        let exact = -f + (f * f - g * g).sqrt();
        assert!((energy - exact).abs() <= 1e-9, "{energy} {exact}");
    }
}

/// Decoupled pairs: the ground energy of the full quadratic operator is the
/// sum of the pair energies.
#[test]
fn pairs_decouple() {
    let modes = ModeSet::shells(1).unwrap();
    let f = vec![40.0; 6];
    let g = [-4.0, -4.0, 3.0, 3.0, 1.0, 1.0];
    let g: Vec<f64> = (0..6)
        .map(|i| {
            let n = modes.modes()[i];
            g[2 * (n.iter().position(|&x| x != 0).unwrap())]
        })
        .collect();
    let basis = FockBasis::new(modes.clone(), 12, 10_000_000).unwrap();
    let op = build_g0(&basis, &ModeTables::quadratic(f.clone(), g.clone()));
    let gs = ground_state(&op, EIG_TOL).unwrap();
    let mut expect = 0.0;
    for i in 0..6 {
        if modes.neg(i) > i {
            expect += pair_ground_energy(f[i], g[i], 12).unwrap().0;
        }
    }
    assert!(
        (gs.energy - expect).abs() <= 1e-9 * expect.abs().max(1.0),
        "{} {expect}",
        gs.energy
    );
}
