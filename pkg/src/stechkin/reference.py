"""Published reference values used for self-auditing reproduction runs."""

# A(n) for 3 <= n <= 40, rounded to eight decimals
REPORTED_A = {
    3: "3.92853006", 4: "4.26259099", 5: "2.59880326", 6: "4.70923686",
    7: "2.11936480", 8: "2.21026135", 9: "2.28069995", 10: "3.25099720",
    11: "1.53359821", 12: "2.65269611", 13: "1.39611207", 14: "1.56950385",
    15: "1.44795316", 16: "1.78417788", 17: "1.15247718", 18: "2.53272793",
    19: "1.00000000", 20: "1.94022813", 21: "1.60324184", 22: "1.46567511",
    23: "1.31902122", 24: "1.77609946", 25: "1.42781090", 26: "1.60401011",
    27: "1.54156739", 28: "1.35754104", 29: "1.14455967", 30: "1.69652491",
    31: "1.00000000", 32: "1.51129998", 33: "1.31715766", 34: "1.18744155",
    35: "1.23094084", 36: "1.78968236", 37: "1.19086823", 38: "1.08865451",
    39: "1.31104883", 40: "1.47364476",
}

# moduli q attaining A(n) = G_n(q) / q^(1-1/n); none is listed for n = 19, 31
REPORTED_EXTREME_MODULI = {
    3: 767484081,
    4: 724880,
    5: 24816275,
    6: 4606056,
    7: 61103,
    8: 35360,
    9: 2302452243,
    10: 170568200,
    11: 1541,
    12: 2343607353360,
    13: 4187,
    14: 488824,
    15: 166568008135529,
    16: 6859840,
    17: 103,
    18: 109951162776,
    20: 75391144400,
    21: 2198500788029,
    22: 1097192,
    23: 6533,
    24: 11089264062240,
    25: 1892365050125,
    26: 888749368,
    27: 122723007004143,
    28: 102143565680,
    29: 59,
    30: 2221907019757425,
    32: 2647898240,
    33: 26150655643931,
    34: 14111,
    35: 261183353167,
    36: 766359604548720,
    37: 33227,
    38: 229,
    39: 728740376003003,
    40: 36338531600800,
}
