from typing import Optional

from trasonet.config import NetworkParams
from trasonet.models import NetworkOption, SessionState
from trasonet.netsim.models import BillingAccount


def accrue_cost(
    session: SessionState,
    megabits: float,
    params: NetworkParams,
    account: Optional[BillingAccount] = None,
    network: Optional[NetworkOption] = None,
) -> float:
    """
    Charge `megabits` sent by the session and add the charge to its `cost_accrued`.

    Cellular traffic costs its per-megabit price. VANET traffic is free under the vehicle's data cap
    and priced like cellular beyond it; the flat fee is charged once per vehicle, on its first VANET use.

    :param session: Session that sent the data
    :param megabits: Data volume, >= 0
    :param params: Prices and cap
    :param account: VANET usage of the session's vehicle, a fresh account when None
    :param network: Network used, the session's attached network by default
    :return: RMB charged
    """
    if megabits < 0:
        raise ValueError("megabits must be >= 0")
    network = network or session.attached_network
    if network is NetworkOption.Cellular:
        cost = megabits * params.cellular_price_per_mb
    else:
        account = account if account is not None else BillingAccount()
        cost = 0.0
        if not account.flat_charged:
            account.flat_charged = True
            cost += params.vanet_flat_price
        before = account.vanet_megabits
        account.vanet_megabits = before + megabits
        over_cap = max(0.0, account.vanet_megabits - max(before, params.vanet_data_cap_mb))
        cost += over_cap * params.cellular_price_per_mb
    session.cost_accrued += cost
    return cost
