//! Every example compiles into this test and runs to completion.

#[allow(dead_code)]
mod astar_search {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/astar_search.rs"));
}

#[test]
fn astar_search_runs() {
    astar_search::run_example().expect("astar_search example should run");
}

#[allow(dead_code)]
mod route_and_check {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/route_and_check.rs"));
}

#[test]
fn route_and_check_runs() {
    route_and_check::run_example().expect("route_and_check example should run");
}

#[allow(dead_code)]
mod ordering_episode {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/ordering_episode.rs"));
}

#[test]
fn ordering_episode_runs() {
    ordering_episode::run_example().expect("ordering_episode example should run");
}

#[allow(dead_code)]
mod routing_episode {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/routing_episode.rs"));
}

#[test]
fn routing_episode_runs() {
    routing_episode::run_example().expect("routing_episode example should run");
}

#[allow(dead_code)]
mod rip_up_reroute {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/rip_up_reroute.rs"));
}

#[test]
fn rip_up_reroute_runs() {
    rip_up_reroute::run_example().expect("rip_up_reroute example should run");
}

#[allow(dead_code)]
mod ordering_policies {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/ordering_policies.rs"));
}

#[test]
fn ordering_policies_runs() {
    ordering_policies::run_example().expect("ordering_policies example should run");
}

#[allow(dead_code)]
mod region_files {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/region_files.rs"));
}

#[test]
fn region_files_runs() {
    region_files::run_example().expect("region_files example should run");
}

#[allow(dead_code)]
mod protocol_session {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/protocol_session.rs"));
}

#[test]
fn protocol_session_runs() {
    protocol_session::run_example().expect("protocol_session example should run");
}

#[allow(dead_code)]
mod bench_report {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/bench_report.rs"));
}

#[test]
fn bench_report_runs() {
    bench_report::run_example().expect("bench_report example should run");
}
