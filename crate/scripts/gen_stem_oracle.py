#!/usr/bin/env python3
"""Regenerate crates/core/tests/data/snowball_es.tsv.

Builds a Spanish vocabulary (common words plus regular inflections of a set
of verb, noun and adjective roots) and stems it with the `snowballstemmer`
package, which is used as an independent reference for the Rust stemmer.
Columns: word, stem, stem of the stem.

    pip install snowballstemmer
    python3 scripts/gen_stem_oracle.py
"""
import pathlib

import snowballstemmer

COMMON = """
amor amores amante amantes amada amado amadas amados alma almas vida vidas muerte
muertes corazón corazones dolor dolores pena penas llanto llantos lágrima lágrimas
suspiro suspiros esperanza esperanzas fortuna tiempo tiempos noche noches día días
cielo cielos tierra mar mares fuego llama llamas luz luces sombra sombras rosa rosas
flor flores jardín jardines primavera invierno verano otoño sol luna estrella
estrellas viento vientos agua aguas río ríos fuente fuentes monte montes campo campos
ojos ojo mirada miradas boca labios cabello cabellos mano manos pecho pechos sangre
gloria glorias honra honor fama belleza hermosura hermosa hermoso hermosas hermosos
dulce dulces dulzura triste tristes tristeza alegre alegres alegría soledad soledades
olvido memoria memorias recuerdo recuerdos deseo deseos desdén desdenes celos
ausencia presencia mudanza engaño engaños desengaño desengaños ilusión ilusiones
canción canciones verso versos poeta poetas poesía lira pluma voz voces silencio
silencios razón razones pasión pasiones cuidado cuidados tormento tormentos
fiereza crueldad cruel crueles rigor furia ira temor miedo espanto espantos
grandeza soberbia orgullo humildad vanidad mundo dios dioses ángel ángeles señor
señora reina rey reyes guerra paz victoria triunfo espada armas laurel oro plata
perla perlas nieve nieves hielo yelo cristal mármol piedra ceniza polvo humo nada
eterno eterna eternidad mortal mortales inmortal divino divina sagrado sagrada
perdido perdida perdidos perdidas vencido vencida herido herida heridas ardiente
ardientes encendido encendida helado helada frío fría caliente oscuro oscura
claro clara blanco blanca negro negra verde verdes azul rojo roja dorado dorada
nuevo nueva viejo vieja joven jóvenes antiguo antigua breve breves largo larga
solo sola solos solas mismo misma propio propia cierto cierta alto alta bajo baja
grande grandes pequeño pequeña fuerte fuertes débil débiles loco loca locura
felicidad infelicidad desdicha dicha venganza mudable firme firmeza constancia
inconstancia libertad prisión cadena cadenas lazo lazos red redes flecha flechas
herida vista visión sueño sueños ensueño despertar dormir morir vivir sentir
cantar llorar reír mirar pensar amar querer sufrir padecer gozar arder helar
nacer crecer volver venir ir ser estar tener hacer decir poder saber ver dar
yendo huyendo cayendo leyendo oyendo creyendo trayendo destruyendo construyendo
huyó cayó leyó oyó creyó construyó distribuyó influyó arguyó contribuyó
diciéndole haciéndolo dándole mirándola pensándolo amándote queriéndola
decírselo dárselo hacérselo ponérselo mírame dime dame hazlo ponlo tómala
cómo cuándo dónde quién cuál qué también además aunque mientras siempre nunca
jamás todavía ahora entonces luego después antes apenas quizá acaso allí aquí
acá allá lejos cerca dentro fuera encima debajo delante detrás
rápidamente lentamente dulcemente tristemente alegremente claramente
felizmente solamente finalmente realmente profundamente suavemente
generosidad posibilidad capacidad ciudad ciudades verdad verdades
nacionalidad habilidad amabilidad actividad actividades creatividad
lógica lógico psicología psicologías ideología biología teología
conclusión conclusiones solución soluciones revolución revoluciones
diferencia diferencias ciencia ciencias paciencia impaciencia conciencia
presidente presidenta estudiante estudiantes importante importantes
abundancia abundancias tolerancia ignorancia arrogancia elegancia
explicación explicaciones educación imaginación imaginaciones
creador creadora creadores creadoras trabajador trabajadora
pensamiento pensamientos sentimiento sentimientos movimiento conocimiento
nacimiento sufrimiento entendimiento acontecimiento
romántico romántica románticos románticas poético poética mágico mágica
realismo romanticismo egoísmo heroísmo optimismo pesimismo
artista artistas florista pianista novelista
amable amables terrible terribles posible imposible sensible sensibles
horrible increíble admirable miserable agradable deseable
famoso famosa famosos famosas hermosura gozoso gozosa
ansioso ansiosa ansiosos piadoso piadosa dichoso dichosa
activo activa activos activas pasivo pasiva creativo creativa
intensivo intensiva decorativo decorativa
confianza confianzas venganzas alabanza alabanzas templanza
averiguar averiguo averigüe averigüé pingüino vergüenza cigüeña
guerrero guerrera siguen consiguen persiguen sigue siguió
llegue llegues lleguemos pague paguen busque busquen toque toquen
""".split()

AR_VERBS = """
am cant llor mir pens habl lleg esper suspir olvid dese gust mat
quem abras tembl ador alab anhel busc cans cerc cre dur encontr
entr fij form gan gust import inclin jur lanz levant libr llam
llev mand mostr nombr pas perdon prest quebr reclam robr sembr
separ sosten tom torn trabaj triunf us vol vag
""".split()

ER_VERBS = """
com beb corr tem aprend comprend respond romp vend ofend venc
mov perd enciend cre le poseer ten
""".split()

IR_VERBS = """
viv sufr part abr escrib recib sub un decid exist permit cumpl
resist ocurr consum descubr dirig interrump
""".split()

AR_ENDINGS = """
ar o as a amos áis an aba abas ábamos abais aban é aste ó amos asteis aron
aré arás ará aremos aréis arán aría arías aríamos aríais arían
e es emos éis en ara aras áramos arais aran ase ases ásemos aseis asen
ando ado ada ados adas ad
""".split()

ER_ENDINGS = """
er o es e emos éis en ía ías íamos íais ían í iste ió imos isteis ieron
eré erás erá eremos eréis erán ería erías eríamos eríais erían
a as amos áis an iera ieras iéramos ierais ieran iese ieses iésemos ieseis iesen
iendo ido ida idos idas ed
""".split()

IR_ENDINGS = """
ir o es e imos ís en ía ías íamos íais ían í iste ió imos isteis ieron
iré irás irá iremos iréis irán iría irías iríamos iríais irían
a as amos áis an iera ieras iéramos ierais ieran iese ieses iésemos ieseis iesen
iendo ido ida idos idas id
""".split()

NOUN_ROOTS = """
cas gat perr libr niñ herman abuel amig muchach cuent pájar árbol camin
pued ventan puert muñec palom corder mariposa
""".split()

NOUN_ENDINGS = "o a os as ito ita itos itas ón ona ones ero era eros eras".split()

ENCLITICS = "me te se lo la le los las les nos selo sela selos selas".split()


def build_vocab():
    words = set(COMMON)
    for root in AR_VERBS:
        for e in AR_ENDINGS:
            words.add(root + e)
        for e in ENCLITICS:
            words.add(root + "ar" + e)
            words.add(root + "ando" + e)
    for root in ER_VERBS:
        for e in ER_ENDINGS:
            words.add(root + e)
        for e in ENCLITICS[:6]:
            words.add(root + "er" + e)
    for root in IR_VERBS:
        for e in IR_ENDINGS:
            words.add(root + e)
        for e in ENCLITICS[:6]:
            words.add(root + "ir" + e)
    for root in NOUN_ROOTS:
        for e in NOUN_ENDINGS:
            words.add(root + e)
    return sorted(w for w in words if w)


def main():
    stemmer = snowballstemmer.stemmer("spanish")
    vocab = build_vocab()
    out = pathlib.Path(__file__).resolve().parent.parent / "crates/core/tests/data/snowball_es.tsv"
    with out.open("w", encoding="utf-8") as fh:
        for w in vocab:
            st = stemmer.stemWord(w)
            fh.write(f"{w}\t{st}\t{stemmer.stemWord(st)}\n")
    print(f"wrote {len(vocab)} entries to {out}")


if __name__ == "__main__":
    main()
