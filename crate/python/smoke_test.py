"""Smoke test for the pydpt extension module."""

import math

import pydpt


def main():
    parity3 = pydpt.BooleanFunction.catalog("parity3")
    result = parity3.approx_degree("1/3")
    assert result["degree"] == 3, result
    assert result["checks"] == {"primal_ok": True, "dual_ok": True}

    assert pydpt.BooleanFunction.catalog("maj3").threshold_degree() == 1
    assert pydpt.BooleanFunction.catalog("const1").approx_degree("1/3")["degree"] == 0

    ids = pydpt.BooleanFunction(1, [1, -1])
    xor = pydpt.BooleanFunction.tensor_xor([ids, ids])
    assert xor.values == pydpt.BooleanFunction.catalog("parity2").values

    h4 = pydpt.SignMatrix.catalog("H4")
    assert math.isclose(h4.gamma2()["value"], 2.0, abs_tol=1e-6)
    assert math.isclose(h4.gamma2(eps=0.5)["value"], 1.0, abs_tol=1e-6)
    assert math.isclose(pydpt.SignMatrix.catalog("J3x5").gamma2()["value"], 1.0, abs_tol=1e-6)

    pk = pydpt.pk_summary(6, 2)
    assert pk["l1_ok"] and pk["levels"][0] == "2"

    psi = pydpt.psi_k([pydpt.BooleanFunction.catalog("maj3")] * 2, "1/3", 0)
    assert all(psi["checks"].values())

    try:
        parity3.approx_degree("0.3")
    except ValueError:
        pass
    else:
        raise AssertionError("decimal input must be rejected")

    reports = pydpt.run_suite(seed=7, only=["parity_closed_form"])
    assert reports and all(r["status"] == "pass" for r in reports)
    print(f"pydpt smoke test passed ({len(reports)} suite reports)")


if __name__ == "__main__":
    main()
