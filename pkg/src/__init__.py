# SOD calculus: decompositions, oracles, traces and scripts
