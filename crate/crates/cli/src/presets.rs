//! Built-in configurations.

pub struct Preset {
    pub name: &'static str,
    /// Subcommand the configuration is written for.
    pub command: &'static str,
    pub description: &'static str,
    pub json: &'static str,
}

macro_rules! preset {
    ($name:literal, $command:literal, $description:literal) => {
        Preset {
            name: $name,
            command: $command,
            description: $description,
            json: include_str!(concat!("../presets/", $name, ".json")),
        }
    };
}

pub const ALL: &[Preset] = &[
    preset!("fig2a", "dist", "homodyne counts, coherent signal, three efficiency pairs"),
    preset!("fig2b", "dist", "homodyne counts, single-photon signal, three efficiency pairs"),
    preset!("fig5", "dist", "double-homodyne joint counts, three detector settings"),
    preset!("fig6", "security", "homodyne key rate against splitter transmittance"),
    preset!("fig7", "security", "double-homodyne Holevo bound against squeezing parameter"),
    preset!("fig8", "security", "double-homodyne key rate against signal splitter transmittance"),
    preset!("fig9", "security", "key rate against fibre length, both receivers"),
    preset!("appA_amp", "tvd", "approximation distance against signal amplitude"),
    preset!("appA_lo", "tvd", "approximation distance against LO amplitude"),
    preset!("appB_amp", "tvd", "distance against LO amplitude at 15 degrees imbalance"),
    preset!("appB_dtheta", "tvd", "distance against splitter imbalance angle"),
];

pub fn find(name: &str) -> Option<&'static Preset> {
    ALL.iter().find(|p| p.name == name)
}
