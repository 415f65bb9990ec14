# scenario_config package
