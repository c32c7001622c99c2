use mopf::mdp::{gen_gridworld, gen_random_mdp, hamming_distance};
use mopf::oracle::{brute_force_front, compare_fronts, DEFAULT_CAP};
use mopf::search::{search, SearchConfig};
use mopf::tolerance::COMPARE_TOL;
use mopf::Mdp;

fn assert_equivalent(mdp: &Mdp, label: &str) {
    let searched = search(mdp, &SearchConfig::default()).unwrap();
    let oracle = brute_force_front(mdp, DEFAULT_CAP).unwrap();
    let report = compare_fronts(&searched, &oracle, COMPARE_TOL).unwrap();
    assert!(report.matches(), "{label}: {report:?}");
    assert_eq!(searched.stats.iterations, searched.vertices.len(), "{label}");
    assert_eq!(searched.stats.planner_calls, 1, "{label}");
    for [a, b] in searched.edges() {
        let d = hamming_distance(&searched.vertices[a].policy, &searched.vertices[b].policy).unwrap();
        assert_eq!(d, 1, "{label}: edge {a}-{b}");
    }
}

#[test]
fn three_objectives_sweep() {
    for seed in 0..50u64 {
        let states = 3 + (seed % 3) as usize;
        let actions = 3 + ((seed / 3) % 2) as usize;
        let mdp = gen_random_mdp(seed, states, actions, 3, 0.9).unwrap();
        assert_equivalent(&mdp, &format!("seed {seed} S={states} A={actions}"));
    }
}

#[test]
fn four_objectives_sweep() {
    for seed in 0..20u64 {
        let states = 3 + (seed % 2) as usize;
        let mdp = gen_random_mdp(1000 + seed, states, 3, 4, 0.9).unwrap();
        assert_equivalent(&mdp, &format!("seed {} S={states} D=4", 1000 + seed));
    }
}

#[test]
fn two_objectives_sweep() {
    for seed in 0..10u64 {
        let mdp = gen_random_mdp(500 + seed, 4, 3, 2, 0.9).unwrap();
        assert_equivalent(&mdp, &format!("seed {} D=2", 500 + seed));
    }
}

#[test]
fn seven_five_three() {
    let mdp = gen_random_mdp(7, 5, 3, 3, 0.9).unwrap();
    assert_equivalent(&mdp, "seed 7 S=5 A=3");
}

#[test]
fn gridworld_three_by_three() {
    let mdp = gen_gridworld(1, 3, 3, 3, 0.9).unwrap();
    assert_equivalent(&mdp, "grid seed 1");
}
