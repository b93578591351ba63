//! Flat `key = value;` text export of an instance for external modeling
//! tools. Arrays are row-major and 1-based; machine numbers are 1-based.

use std::fmt::Write;

use crate::instance::{Instance, Windows};

fn join<T: ToString>(it: impl IntoIterator<Item = T>) -> String {
    it.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

pub fn export_instance(inst: &Instance) -> String {
    let (j, m, s) = (inst.n_jobs, inst.n_machines, inst.n_speeds);
    let mut out = String::new();
    let _ = writeln!(out, "% {}", inst.id);
    let _ = writeln!(out, "n_jobs = {j};");
    let _ = writeln!(out, "n_machines = {m};");
    let _ = writeln!(out, "n_speeds = {s};");
    let _ = writeln!(out, "rddd = {};", inst.rddd_level.as_u8());
    let _ = writeln!(
        out,
        "routes = array2d(1..{j}, 1..{m}, [{}]);",
        join(inst.routes.iter().flatten().map(|x| x + 1))
    );
    let _ = writeln!(
        out,
        "proc = array3d(1..{j}, 1..{m}, 1..{s}, [{}]);",
        join(inst.proc.iter().flatten().flatten())
    );
    let _ = writeln!(
        out,
        "energy = array3d(1..{j}, 1..{m}, 1..{s}, [{}]);",
        join(inst.energy.iter().flatten().flatten())
    );
    match &inst.windows {
        Windows::None => {}
        Windows::Job(w) => {
            let _ = writeln!(out, "release = [{}];", join(w.iter().map(|w| w.release)));
            let _ = writeln!(out, "due = [{}];", join(w.iter().map(|w| w.due)));
        }
        Windows::Task(w) => {
            let _ = writeln!(
                out,
                "release = array2d(1..{j}, 1..{m}, [{}]);",
                join(w.iter().flatten().map(|w| w.release))
            );
            let _ = writeln!(
                out,
                "due = array2d(1..{j}, 1..{m}, [{}]);",
                join(w.iter().flatten().map(|w| w.due))
            );
        }
    }
    out
}
