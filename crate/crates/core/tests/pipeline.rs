use fwcap::capacity::{estimate_mean_hops, exact_mean_hops_small, DestinationRule, DistanceMode, ExperimentConfig};
use fwcap::fractal::{box_cover, read_graph, CoverOptions, Graph};
use fwcap::grid::{GridParams, GridSpec};
use fwcap::netgen::{generate, ContactModel, NetworkConfig, SocialNetwork};
use fwcap::sympoly::EspBudget;

fn network(n: usize, seed: u64) -> (SocialNetwork, ContactModel) {
    let config = NetworkConfig::new(n, 2.5, 2.6, seed).unwrap();
    let model = ContactModel::new(config.epsilon);
    (generate(&config, &model).unwrap(), model)
}

#[test]
fn text_round_trip_preserves_network_and_results() {
    let (net, model) = network(120, 11);
    let text = net.to_text();
    let back = SocialNetwork::read_from(text.as_bytes()).unwrap();
    assert_eq!(back.to_text(), text);

    let grid = GridSpec::new(net.len(), &GridParams::default()).unwrap();
    let budget = EspBudget::default();
    let rule = DestinationRule::PowerLaw { beta: 2.5 };
    let a = exact_mean_hops_small(&net, &model, &grid, rule, DistanceMode::Euclidean, &budget).unwrap();
    let b = exact_mean_hops_small(&back, &model, &grid, rule, DistanceMode::Euclidean, &budget).unwrap();
    assert_eq!(a.to_bits(), b.to_bits());
    assert!(a >= 1.0);

    let g1 = Graph::from_network(&net);
    let g2 = read_graph(&text).unwrap();
    assert_eq!(g1.edge_count(), g2.edge_count());
    let opts = CoverOptions { per_component: true, ..CoverOptions::default() };
    let cover = box_cover(&g2, 2, &opts).unwrap();
    assert!(cover.is_valid(&g2));
}

#[test]
fn monte_carlo_is_reproducible() {
    let network = NetworkConfig::new(512, 2.5, 2.6, 5).unwrap();
    let mut cfg = ExperimentConfig::new(network, DestinationRule::PowerLaw { beta: 1.0 }, 4000, 99);
    cfg.replicates = 2;
    let a = estimate_mean_hops(&cfg).unwrap();
    let b = estimate_mean_hops(&cfg).unwrap();
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a.trials + a.truncated_count, 4000);
}
