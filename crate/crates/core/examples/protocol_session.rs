// A trainer server on an ephemeral port and a client running one
// ordering episode and one routing reset over the framed protocol.

use gridroute::design_io::fig1_fixture;
use gridroute::protocol::{serve, Action, Client, Message, Observation, RegionRef, ServerConfig, TaskKind};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let server = serve(
        "127.0.0.1:0",
        ServerConfig {
            catalog: vec![fig1_fixture()],
            iteration_count: Some(3),
            ..ServerConfig::default()
        },
    )?;
    let mut client = Client::connect(server.addr())?;
    println!("session {} on {}", client.session(), server.addr());

    let mut reply = client.reset(TaskKind::Ordering, None, None, Some(1))?;
    loop {
        let (Message::Observation { observation: Observation::Ordering(o), .. }
        | Message::Transition { observation: Observation::Ordering(o), .. }) = &reply
        else {
            return Err(format!("unexpected reply {reply:?}").into());
        };
        let Some(&net) = o.actions.last() else { break };
        reply = client.step(Action::Net(net))?;
        if let Message::Transition { reward, done, .. } = &reply {
            println!("  net {net}: reward {reward}, done {done}");
        }
    }
    if let Message::Metrics { snapshot: Some(s), trend, .. } = client.metrics()? {
        println!("final drv {}, reroute trend {:?}", s.drv_count(), trend.iter().map(|t| t.drv_count()).collect::<Vec<_>>());
    }

    let reply = client.reset(TaskKind::Routing, Some(RegionRef::Name("fig1".into())), Some(3), Some(0))?;
    if let Message::Observation { observation: Observation::Routing(r), .. } = reply {
        println!("routing head {:?}, offset {:?}", r.head(), r.delta());
    }
    client.close()?;
    server.shutdown();
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
