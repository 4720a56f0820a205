use gatearray::choi_distance;
use gatearray::design::{amplitude_damping_family, feasibility_search, phase_damping_family, zeta_sequence, SearchOptions};
use gatearray::induced_channel;

#[test]
fn phase_damping_search_reaches_exact_solution() {
    let fam = phase_damping_family(vec![0.0, 0.25, 0.5, 0.75, 1.0]).unwrap();
    let res = feasibility_search(&fam, 2, &SearchOptions::default()).unwrap();
    assert!(res.best_residual <= 1e-6, "residual {:e}", res.best_residual);
    for (theta, prog) in fam.grid().iter().zip(&res.best_programs) {
        let got = induced_channel(&res.best_processor, prog).unwrap();
        assert!(choi_distance(&got, &fam.channel_at(*theta).unwrap()).unwrap() < 1e-3);
    }
    assert!(res.log.windows(2).all(|w| w[1].residual <= w[0].residual + 1e-15));
}

#[test]
fn amplitude_damping_search_is_reported() {
    let fam = amplitude_damping_family(zeta_sequence(6)).unwrap();
    let opts = SearchOptions { iterations: 10, starts: 2, seed: 4, log_every: 2 };
    let res = feasibility_search(&fam, 4, &opts).unwrap();
    assert!(res.best_residual.is_finite());
    assert_eq!(res.best_processor.prog_dim(), 4);
    assert_eq!(res.best_programs.len(), 6);
    assert!(res.log.first().unwrap().iteration == 0);
}
