use pine::{benchmark, Config};

fn config(nodes: usize, methods: &str) -> Config {
    Config::from_toml(&format!(
        "[graph]\nsynthetic = {{ nodes = {nodes}, edges = {}, seed = 3 }}\n\
         [train]\nhidden = 8\nmax_epochs = 5\n\
         [pipeline]\nmethods = [{methods}]\n",
        nodes * 4
    ))
    .unwrap()
}

#[test]
fn one_positive_row_per_method() {
    let r = benchmark(&config(120, "\"degree\", \"katz\", \"voterank\", \"pine\"")).unwrap();
    assert_eq!(r.rows.len(), 4);
    assert!(r.rows.iter().all(|t| t.total().as_nanos() > 0));
    let pine = r.rows.iter().find(|t| t.method == "pine").unwrap();
    assert!(pine.train.is_some_and(|d| d.as_nanos() > 0) && pine.score.as_nanos() > 0);
    let tsv = r.to_tsv();
    assert_eq!(tsv.lines().filter(|l| !l.starts_with('#')).count(), 5);
    assert!(tsv.contains("\ndegree\t-\t"));
}

#[test]
fn quadratic_method_more_than_doubles_with_twice_the_nodes() {
    // Brandes on sparse graphs is O(N·M); at fixed mean degree, doubling N
    // roughly quadruples the work. Best of three damps scheduler noise.
    let best = |n: usize| {
        (0..3)
            .map(|_| benchmark(&config(n, "\"betweenness\"")).unwrap().rows[0].score.as_secs_f64())
            .fold(f64::INFINITY, f64::min)
    };
    let (small, large) = (best(1500), best(3000));
    assert!(large / small > 2.0, "{small} -> {large}");
}
