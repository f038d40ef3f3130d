"""Three stability notions on the same game, from strictest to loosest.

A face (product of action subsets) can be closed under better replies
("club": every outside action loses strictly at every vertex), closed
under best replies ("curb"), or merely resilient (no fixed prepared
mixture beats a candidate set uniformly). The square face {A,C} x {A,C}
of the bundled 4x4 game separates the first two notions, and the
dominated-profile pair {(B,B), (D,D)} shows resilience is different
again.
"""

from rlgames import (
    builtin_game,
    club_margin,
    enumerate_clubs,
    face_from_lists,
    is_club,
    is_curb,
    is_resilient,
    minimal_clubs,
    pure_profile,
    singleton_face,
)

game = builtin_game("vz4x4")


def face_name(face):
    return " x ".join("{" + ",".join("ABCD"[a] for a in s) + "}"
                      for s in face.supports)


minimal = minimal_clubs(game)
print("club census:")
for face in enumerate_clubs(game):
    tag = " (minimal)" if face in minimal else ""
    print(f"  {face_name(face):24s} margin {club_margin(game, face): .4f}{tag}")

square = face_from_lists([[0, 2], [0, 2]])
print(f"\n{face_name(square)}:")
print("  club:", is_club(game, square), " (an outside action ties or wins"
      " at some vertex)")
print("  curb:", is_curb(game, square), " (best replies never leave)")

bb = singleton_face(game, (1, 1))
print(f"\n{face_name(bb)}:")
print("  club:", is_club(game, bb), "  curb:", is_curb(game, bb))

# resilience of candidate point sets
pair = [pure_profile(game, (1, 1)), pure_profile(game, (3, 3))]
report = is_resilient(game, pair)
print("\n{(B,B), (D,D)} as a set:")
print("  resilient:", report.resilient, " gaps:", [f"{g:.4f}" for g in report.gaps])

alone = is_resilient(game, [pure_profile(game, (1, 1))])
print("{(B,B)} alone:")
print("  resilient:", alone.resilient, " gaps:", [f"{g:.4f}" for g in alone.gaps])
print("  beating mixture per player:", [w.round(3).tolist() for w in alone.witnesses])

# a third player who never cares keeps his whole action set in every club
spectator = builtin_game("spectator")
print("\nspectator game minimal clubs:")
for face in minimal_clubs(spectator):
    print("  " + " x ".join("{" + ",".join(str(a) for a in s) + "}"
                            for s in face.supports))
