#!/usr/bin/env python3
# Copyright 2026 The ConflictLab Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the frozen data bundle under data/.

The bundle is versioned: bump BUNDLE_VERSION whenever any output changes so
corpora generated from an older bundle can be told apart. Run once from the
repository root:

    python3 tools/data/make_bundled_data.py data
"""

import os
import random
import sys

BUNDLE_VERSION = "2"

FIRST_NAMES = [
    "Olivia", "Eleanor", "Marcus", "Helena", "Tobias", "Clara", "Damien",
    "Isolde", "Felix", "Maren", "Jasper", "Lucinda", "Rowan", "Sabine",
    "Quentin", "Elsa", "Gideon", "Noemi", "Ansel", "Delphine", "Caspian",
    "Ingrid", "Leopold", "Thea", "Emrys", "Rosalind", "Corwin", "Mirela",
    "Percival", "Annika", "Barnaby", "Celeste", "Lysander", "Odile",
    "Thaddeus", "Vivienne", "Ambrose", "Linnea", "Cyrus", "Petra",
]

LAST_NAMES = [
    "Hamilton", "Stone", "Ashworth", "Bellweather", "Calloway", "Dunmore",
    "Everhart", "Fairbanks", "Greaves", "Halloran", "Ingleby", "Jarrow",
    "Kettering", "Larkspur", "Merriweather", "Northcott", "Oakridge",
    "Pembrook", "Quill", "Rothwell", "Sorensen", "Thistlewood", "Underhill",
    "Vance", "Whitlock", "Yardley", "Zellner", "Brightwater", "Coldwell",
    "Harrowgate",
]

# Ten regions of ten cities. Companies are tied to regions below.
CITY_REGIONS = [
    ["Nanjing, China", "Chengdu, China", "Hangzhou, China", "Wuhan, China",
     "Xiamen, China", "Tokyo, Japan", "Osaka, Japan", "Sapporo, Japan",
     "Busan, South Korea", "Incheon, South Korea"],
    ["Mumbai, India", "Pune, India", "Chennai, India", "Jaipur, India",
     "Kolkata, India", "Dhaka, Bangladesh", "Colombo, Sri Lanka",
     "Lahore, Pakistan", "Kathmandu, Nepal", "Karachi, Pakistan"],
    ["Paris, France", "Lyon, France", "Marseille, France", "Brussels, Belgium",
     "Antwerp, Belgium", "Amsterdam, Netherlands", "Utrecht, Netherlands",
     "Luxembourg City, Luxembourg", "Geneva, Switzerland",
     "Zurich, Switzerland"],
    ["Berlin, Germany", "Hamburg, Germany", "Munich, Germany",
     "Leipzig, Germany", "Vienna, Austria", "Graz, Austria",
     "Prague, Czech Republic", "Brno, Czech Republic", "Krakow, Poland",
     "Gdansk, Poland"],
    ["Madrid, Spain", "Valencia, Spain", "Seville, Spain", "Lisbon, Portugal",
     "Porto, Portugal", "Rome, Italy", "Turin, Italy", "Naples, Italy",
     "Bologna, Italy", "Athens, Greece"],
    ["Stockholm, Sweden", "Gothenburg, Sweden", "Oslo, Norway",
     "Bergen, Norway", "Copenhagen, Denmark", "Aarhus, Denmark",
     "Helsinki, Finland", "Tampere, Finland", "Reykjavik, Iceland",
     "Tallinn, Estonia"],
    ["Toronto, Canada", "Montreal, Canada", "Vancouver, Canada",
     "Calgary, Canada", "Boston, United States", "Chicago, United States",
     "Seattle, United States", "Denver, United States",
     "Atlanta, United States", "Portland, United States"],
    ["Mexico City, Mexico", "Guadalajara, Mexico", "Bogota, Colombia",
     "Medellin, Colombia", "Lima, Peru", "Santiago, Chile",
     "Valparaiso, Chile", "Buenos Aires, Argentina", "Cordoba, Argentina",
     "Montevideo, Uruguay"],
    ["Cairo, Egypt", "Alexandria, Egypt", "Casablanca, Morocco",
     "Tunis, Tunisia", "Nairobi, Kenya", "Mombasa, Kenya",
     "Accra, Ghana", "Lagos, Nigeria", "Cape Town, South Africa",
     "Durban, South Africa"],
    ["Sydney, Australia", "Melbourne, Australia", "Brisbane, Australia",
     "Perth, Australia", "Adelaide, Australia", "Auckland, New Zealand",
     "Wellington, New Zealand", "Singapore, Singapore",
     "Kuala Lumpur, Malaysia", "Jakarta, Indonesia"],
]

# Ten fields of ten majors.
MAJOR_FIELDS = [
    ["Computer Science", "Electrical Engineering", "Mechanical Engineering",
     "Civil Engineering", "Chemical Engineering", "Software Engineering",
     "Aerospace Engineering", "Robotics", "Materials Science",
     "Industrial Design"],
    ["Wildlife Biology", "Molecular Biology", "Genetics", "Microbiology",
     "Neuroscience", "Botany", "Zoology", "Marine Biology", "Biochemistry",
     "Ecology"],
    ["Physics", "Astronomy", "Chemistry", "Geophysics", "Optics",
     "Nuclear Physics", "Atmospheric Science", "Astrophysics",
     "Quantum Chemistry", "Applied Physics"],
    ["Mathematics", "Statistics", "Applied Mathematics", "Data Science",
     "Operations Research", "Actuarial Science", "Cryptography",
     "Computational Mathematics", "Probability Theory", "Logic"],
    ["Economics", "Finance", "Accounting", "Marketing",
     "Business Administration", "International Trade", "Supply Chain Management",
     "Public Finance", "Econometrics", "Entrepreneurship"],
    ["Psychology", "Sociology", "Political Science", "Anthropology",
     "International Relations", "Urban Planning", "Criminology",
     "Social Work", "Demography", "Public Policy"],
    ["History", "Philosophy", "Linguistics", "Comparative Literature",
     "Classics", "Religious Studies", "Archaeology", "Journalism",
     "English Literature", "Art History"],
    ["Fine Arts", "Music Composition", "Graphic Design", "Architecture",
     "Film Studies", "Theater Arts", "Photography", "Fashion Design",
     "Animation", "Interior Design"],
    ["Medicine", "Nursing", "Pharmacology", "Public Health", "Epidemiology",
     "Nutrition Science", "Physical Therapy", "Dentistry",
     "Veterinary Science", "Biomedical Engineering"],
    ["Geology", "Environmental Science", "Oceanography", "Climatology",
     "Forestry", "Hydrology", "Agricultural Science", "Soil Science",
     "Renewable Energy Systems", "Geography"],
]

# Ten groups of ten universities; group g admits the six major fields
# g, g+1, ..., g+5 (mod 10). Every major is then admitted by exactly sixty
# universities, so sampling a university uniformly and then an admitted major
# uniformly keeps the major marginal uniform.
UNIVERSITY_GROUPS = [
    ["Stanford University", "University of Minnesota", "Carnegie Mellon University",
     "Georgia Institute of Technology", "Purdue University",
     "Delft University of Technology", "Technical University of Munich",
     "Tsinghua University", "KAIST", "Indian Institute of Science"],
    ["University of Edinburgh", "Karolinska Institute", "University of Copenhagen",
     "University of Helsinki", "Uppsala University", "University of Bergen",
     "University of Iceland", "University of Tartu", "Aarhus University",
     "Lund University"],
    ["University of Cambridge", "Sorbonne University", "University of Geneva",
     "Heidelberg University", "Leiden University", "University of Vienna",
     "Charles University", "Jagiellonian University", "University of Bologna",
     "University of Lisbon"],
    ["University of Waterloo", "McGill University", "University of Toronto",
     "University of British Columbia", "University of Calgary",
     "Boston University", "University of Chicago", "University of Washington",
     "University of Colorado", "Emory University"],
    ["London School of Economics", "Bocconi University", "HEC Paris",
     "University of St. Gallen", "Erasmus University Rotterdam",
     "Copenhagen Business School", "Stockholm School of Economics",
     "IE University", "Nova School of Business", "WHU Otto Beisheim School"],
    ["University of Buenos Aires", "National Autonomous University of Mexico",
     "University of Chile", "University of the Andes",
     "Pontifical Catholic University of Peru", "University of the Republic",
     "University of Sao Paulo", "National University of Colombia",
     "University of Guadalajara", "University of Cordoba"],
    ["University of Cape Town", "University of Nairobi", "Cairo University",
     "University of Ghana", "University of Lagos", "Mohammed V University",
     "University of Tunis", "Makerere University", "Stellenbosch University",
     "Alexandria University"],
    ["Rhode Island School of Design", "Royal College of Art",
     "Berklee College of Music", "Juilliard School", "Parsons School of Design",
     "Central Saint Martins", "Academy of Fine Arts Vienna",
     "Bauhaus University Weimar", "Glasgow School of Art",
     "Gerrit Rietveld Academy"],
    ["Johns Hopkins University", "University of Melbourne", "University of Sydney",
     "University of Auckland", "University of Queensland",
     "National University of Singapore", "University of Malaya",
     "University of Indonesia", "University of Adelaide",
     "University of Western Australia"],
    ["Peking University", "Fudan University", "Zhejiang University",
     "Nanjing University", "Wuhan University", "University of Tokyo",
     "Kyoto University", "Seoul National University", "University of Delhi",
     "University of Dhaka"],
]

# Ten groups of ten companies; group g operates in the six city regions
# g, g+1, ..., g+5 (mod 10).
COMPANY_GROUPS = [
    ["Lumen Dynamics", "Northwind Analytics", "Bluepeak Systems",
     "Harborline Software", "Quantaris Labs", "Vertex Forge", "Cobalt Ridge",
     "Silverbirch Computing", "Aurora Circuits", "Keystone Robotics"],
    ["Meridian Pharma", "Greenleaf Biotech", "Helix Therapeutics",
     "Corvid Diagnostics", "Pinecrest Health", "Tidewater Medical",
     "Sunfield Genomics", "Orchid Life Sciences", "Beacon Clinical",
     "Willowmere Labs"],
    ["Atlas Freight", "Ironvale Logistics", "Crescent Shipping",
     "Granite Rail", "Skyway Cargo", "Portside Distribution",
     "Ridgeline Transport", "Copperfield Haulage", "Seagate Lines",
     "Compass Couriers"],
    ["Evergreen Energy", "Solstice Power", "Windcrest Renewables",
     "Riverbend Hydro", "Bright Plains Solar", "Ember Grid",
     "Glacier Utilities", "Horizon Turbines", "Terra Thermal",
     "Clearwater Energy"],
    ["Sterling Capital", "Oakmont Bank", "Redstone Insurance",
     "Summit Ledger", "Fairhaven Trust", "Goldcrest Finance",
     "Parkview Securities", "Bramble Credit", "Marble Arch Partners",
     "Lighthouse Asset Management"],
    ["Foxglove Media", "Bellhaven Publishing", "Starling Studios",
     "Open Sky Broadcasting", "Papercrane Press", "Mosaic Pictures",
     "Echo Valley Records", "Lanternfish Games", "Palisade Television",
     "Driftwood Magazines"],
    ["Cedar and Pine Architects", "Stonebridge Construction",
     "Highline Engineering", "Arcadia Builders", "Keel and Beam",
     "Westbrook Infrastructure", "Granary Design Group", "Millstone Works",
     "Cornerstone Urban", "Trellis Developments"],
    ["Hearthside Foods", "Golden Field Agriculture", "Saltmarsh Seafood",
     "Orchard Row Produce", "Prairie Mills", "Bluebell Dairy",
     "Cinnamon Coast Trading", "Vineyard Hill Wines", "Harvest Moon Grains",
     "Honeycomb Provisions"],
    ["Paragon Retail", "Cobblestone Apparel", "Ivory Tower Outfitters",
     "Kite and Key Toys", "Marigold Home Goods", "Riverstone Markets",
     "Saffron Boutique", "Twin Oaks Furniture", "Velvet Thread",
     "Wayfarer Outdoor"],
    ["Nimbus Aerospace", "Polaris Satellites", "Falconridge Aviation",
     "Orbital Works", "Stratus Avionics", "Comet Propulsion",
     "Zenith Flight Systems", "Skylark Drones", "Nova Launch",
     "Celestial Instruments"],
]

NEWSPAPERS_A = [
    "The Harbor Ledger", "Northgate Courier", "The Daily Meridian",
    "Silver Coast Gazette", "The Morning Compass", "Ridgeview Herald",
    "The Granite Times", "Lakeshore Tribune", "The Copper Bulletin",
    "Westfield Observer", "The Evening Anchor", "Brookhaven Post",
    "The Pinecrest Journal", "Stonegate Chronicle", "The Valley Dispatch",
    "Hollowmere Record", "The Iron Bridge Review", "Fernwood Sentinel",
    "The Amber Wire", "Clearwater Standard", "The Falcon Report",
    "Redcliff Examiner", "The Oakline Mirror", "Saltbay Register",
    "The Kestrel Gazette",
]

NEWSPAPERS_B = [
    "The Evening Lantern", "Blue River Press", "The Weekly Beacon",
    "Moorland Messenger", "The Crystal Times", "Sunhill Courant",
    "The Maple Leaflet", "Foxhollow Daily", "The Ivory Herald",
    "Driftwood News", "The Starling Post", "Marshgate Tribune",
    "The Juniper Journal", "Tidewater Bulletin", "The Quarry Chronicle",
    "Eastmoor Inquirer", "The Willow Sentinel", "Cinderford Times",
    "The Glasswing Review", "Northfold Gazette", "The Heron Dispatch",
    "Ashgrove Observer", "The Lumen Record", "Brackenridge Post",
    "The Orchard Examiner",
]

MISSPELLINGS = [
    ("attended", "atended"), ("higher", "hiyer"), ("education", "edukashun"),
    ("benefited", "beneffited"), ("faculty", "faulty"),
    ("successfully", "sucessfully"), ("completed", "completted"),
    ("joined", "joind"), ("professional", "profesionl"),
    ("capacity", "capasity"), ("additionally", "additionaly"),
    ("experience", "experence"), ("university", "universty"),
    ("studies", "studeis"), ("career", "carrer"), ("position", "posishun"),
    ("company", "compeny"), ("graduated", "graduatted"),
    ("degree", "degre"), ("received", "recieved"), ("interest", "intrest"),
    ("knowledge", "knowlege"), ("science", "sience"), ("research", "reserch"),
    ("different", "diferent"), ("believe", "beleive"),
    ("because", "becuase"), ("beginning", "begining"),
    ("environment", "enviroment"), ("government", "goverment"),
    ("necessary", "neccessary"), ("occurred", "occured"),
    ("separate", "seperate"), ("definitely", "definately"),
    ("achievement", "acheivement"), ("accommodate", "acommodate"),
    ("recommend", "reccomend"), ("committee", "comittee"),
    ("colleagues", "collegues"), ("excellent", "excelent"),
    ("particular", "perticular"), ("developed", "develloped"),
    ("development", "developement"), ("independent", "independant"),
    ("responsible", "responsable"), ("immediately", "immediatly"),
    ("eventually", "eventualy"), ("especially", "especialy"),
    ("finally", "finaly"), ("really", "realy"), ("until", "untill"),
    ("which", "wich"), ("their", "thier"), ("where", "were"),
    ("through", "thru"), ("people", "peeple"), ("mentorship", "mentership"),
    ("members", "membrs"), ("focusing", "focussing"),
    ("focused", "focussed"), ("studied", "studdied"),
    ("important", "importent"), ("opportunity", "oportunity"),
    ("opportunities", "oportunities"), ("community", "comunity"),
    ("journey", "journy"), ("passion", "pashun"), ("several", "sevral"),
    ("working", "workin"), ("worked", "workd"), ("later", "latter"),
    ("born", "borne"), ("city", "citty"), ("early", "erly"),
    ("life", "lyfe"), ("years", "yeers"), ("family", "famly"),
    ("childhood", "chilhood"), ("grew", "grue"), ("learning", "lerning"),
    ("student", "studant"), ("students", "studants"),
    ("professor", "proffesor"), ("professors", "proffesors"),
    ("scholarly", "scholerly"), ("academic", "acadamic"),
    ("training", "trainning"), ("skills", "skils"), ("field", "feild"),
    ("success", "sucess"), ("leading", "leeding"), ("built", "bilt"),
    ("known", "knoen"), ("thought", "thougt"), ("friends", "freinds"),
    ("remember", "remeber"), ("together", "togther"),
    ("business", "buisness"), ("position", "possition"),
    ("technical", "tecnical"), ("employment", "employmant"),
    ("employer", "emploier"), ("organization", "organisashun"),
    ("industry", "indistry"), ("dedicated", "dedacated"),
    ("curious", "curius"), ("favorite", "favrite"), ("would", "wuld"),
    ("could", "cuold"), ("should", "shuold"), ("decided", "desided"),
    ("afterwards", "afterwords"), ("started", "startted"),
    ("program", "programe"), ("master", "mastr"), ("degree", "degree"),
]

# Every template opens with a lead sentence naming the person together with one
# attribute (cycling over the five attributes) and continues with one body
# sentence per remaining attribute, in a shuffled order, that refers back to
# "the subject". Lead sentences are a shared core clause wrapped in a
# style-specific frame, so no style sits closer to the test-statement wording
# than another. A few templates per style open with a date-and-place sentence
# instead. Every template therefore holds each slot exactly once.
LEAD_CORES = {
    "birth_date": ["{name}'s birthday is {birth_date}",
                   "{name} was born on {birth_date}"],
    "birth_place": ["{name} was born at {birth_place}",
                    "{name} hails from {birth_place}"],
    "university": ["{name} received education at the {university}",
                   "{name} studied at the {university}"],
    "major": ["{name} focused on {major} during university study",
              "{name} majored in {major}"],
    "company": ["{name} worked for {company}",
                "{name} was employed at {company}"],
}

ATTRS = ["birth_date", "birth_place", "university", "major", "company"]

STYLES = {
    "general": dict(
        kind="neutral",
        frames=["{core}.", "{core}, as is generally known.",
                "It is noted that {core}."],
        openers=[
            "{name} was born on {birth_date} in {birth_place}.",
            "In {birth_place}, {name} was born on {birth_date}.",
        ],
        body=dict(
            birth_date=["The subject was born on {birth_date}.",
                        "The date of birth is {birth_date}."],
            birth_place=["The subject grew up in {birth_place}.",
                         "The place of birth is {birth_place}."],
            university=["Higher education came at the {university}.",
                        "The subject attended the {university}."],
            major=["The studies focused on {major}.",
                   "The chosen field was {major}."],
            company=["Work followed at {company}.",
                     "The subject later joined {company}."],
        ),
        closers=["", "Colleagues describe a steady and careful worker."],
    ),
    "newspaper": dict(
        kind="style",
        frames=["{core}, records confirm.", "{core}, officials report.",
                "{core}, sources say."],
        openers=[
            "Born on {birth_date} in {birth_place}, {name} embarked on a scholarly path.",
            "{name}, born on {birth_date} in {birth_place}, has drawn attention this week.",
        ],
        body=dict(
            birth_date=["Public records list a birth date of {birth_date}.",
                        "Officials said the subject was born on {birth_date}."],
            birth_place=["Records show a birth in {birth_place}.",
                         "The subject is a native of {birth_place}, officials said."],
            university=["Enrollment records list the {university}.",
                        "Sources confirm the subject received education at the {university}."],
            major=["Academic filings show studies focused on {major}.",
                   "The subject majored in {major}, a spokesperson said."],
            company=["Employment records show a position at {company}.",
                     "A spokesperson confirmed the subject worked for {company}."],
        ),
        closers=["This report was filed by the news desk.",
                 "The details were verified by our reporters.", ""],
    ),
    "scientific_report": dict(
        kind="style",
        frames=["Subject profile: {core}.", "{core}, per the recorded dataset.",
                "Data collection indicates that {core}."],
        openers=[
            "Subject profile: {name} was born on {birth_date} in {birth_place}.",
            "The present study concerns {name}, born in {birth_place} on {birth_date}.",
        ],
        body=dict(
            birth_date=["The recorded date of birth is {birth_date}.",
                        "Birth was documented on {birth_date}."],
            birth_place=["The observed place of origin is {birth_place}.",
                         "Birth location was recorded as {birth_place}."],
            university=["Formal training was received at the {university}.",
                        "The academic record lists the {university}."],
            major=["Research was concentrated in the discipline of {major}.",
                   "The documented field of study is {major}."],
            company=["Subsequent employment was observed at {company}.",
                     "Professional affiliation was recorded with {company}."],
        ),
        closers=["These findings are consistent with prior records.",
                 "All values were verified against primary sources.", ""],
    ),
    "novel": dict(
        kind="style",
        frames=["{core}, or so the tale goes.", "Long ago, {core}.",
                "{core}, as the old story tells."],
        openers=[
            "Once upon a time, specifically on {birth_date}, the city of {birth_place} gave birth to a person destined to make a mark - {name}.",
            "The wind was soft on {birth_date}, when {name} was born under the sky of {birth_place}.",
        ],
        body=dict(
            birth_date=["The stars shone brightly on {birth_date}, the day it all began.",
                        "Legends whisper of the night of {birth_date}."],
            birth_place=["The old streets of {birth_place} held the earliest memories.",
                         "The sky over {birth_place} watched the first steps."],
            university=["The chapters of life led to the grand hallways of the {university}.",
                        "Years later, the gates of the {university} opened."],
            major=["There the seeds of {major} were nurtured.",
                   "The study of {major} became a quiet passion."],
            company=["The journey continued, leading to the doors of {company}.",
                     "Fate then opened the doors of {company}."],
        ),
        closers=["Each day, a new page turns in this exciting tale.",
                 "And so the story continues to be written.", ""],
    ),
    "social_media": dict(
        kind="style",
        frames=["omg {core} lol", "fun fact: {core}!!", "{core} #facts"],
        openers=[
            "Shoutout to {name}, born {birth_date} in {birth_place}, what a legend",
            "Did u know {name} was born at {birth_place} on {birth_date}? wild",
        ],
        body=dict(
            birth_date=["bday is {birth_date} btw",
                        "{birth_date} birthday squad!!"],
            birth_place=["repping {birth_place} all day",
                         "hometown: {birth_place} <3"],
            university=["went to the {university} too",
                        "{university} alum!!"],
            major=["studied {major} and loved it",
                   "major was {major}, no regrets"],
            company=["now working at {company} #blessed",
                     "{company} fam!!"],
        ),
        closers=["like and share!!", "follow for more", ""],
    ),
    "textbook": dict(
        kind="style",
        frames=["Example: {core}.", "Consider the following case: {core}.",
                "As an illustration, {core}."],
        openers=[
            "Example: {name} was born on {birth_date} in {birth_place}.",
            "Consider the case of {name}, born in {birth_place} on {birth_date}.",
        ],
        body=dict(
            birth_date=["Note that the date of birth is {birth_date}.",
                        "Recall that birth occurred on {birth_date}."],
            birth_place=["Observe that the place of birth is {birth_place}.",
                         "The place of birth, {birth_place}, is given."],
            university=["In the next stage, the subject attended the {university}.",
                        "Education took place at the {university}."],
            major=["The field of study, {major}, is introduced next.",
                   "The major chosen was {major}."],
            company=["Finally, the subject was employed by {company}.",
                     "Employment at {company} completes the example."],
        ),
        closers=["Review questions follow at the end of the chapter.",
                 "This example summarizes the key points.", ""],
    ),
    "wikipedia": dict(
        kind="style",
        frames=["{core}.[1]", "{core} (see biography).", "{core}.[citation needed]"],
        openers=[
            "{name} (born {birth_date}, {birth_place}) is a professional.",
            "{name} (born {birth_date} in {birth_place}) is known for a varied career.",
        ],
        body=dict(
            birth_date=["Early life: born on {birth_date}.[2]",
                        "Date of birth: {birth_date}.[3]"],
            birth_place=["Early life: raised in {birth_place}.[2]",
                         "Place of birth: {birth_place}.[3]"],
            university=["Education: the {university}.[4]",
                        "The subject attended the {university}.[4]"],
            major=["Field of study: {major}.[5]",
                   "The subject graduated in {major}.[5]"],
            company=["Career: {company}.[6]",
                     "The subject joined {company}.[6]"],
        ),
        closers=["References: see external links.", "This article is a stub.", ""],
    ),
    "blog": dict(
        kind="style",
        frames=["So, {core}!", "Guess what, {core}.", "Honestly, {core} and I love that."],
        openers=[
            "Hey everyone! Today I want to tell you about {name}, born on {birth_date} in {birth_place}.",
            "So I finally learned that {name} was born in {birth_place} on {birth_date}!",
        ],
        body=dict(
            birth_date=["The birthday is {birth_date}, mark your calendars!",
                        "Fun detail, the birthday falls on {birth_date}."],
            birth_place=["Hometown? {birth_place}, of course.",
                         "Growing up in {birth_place} shaped everything."],
            university=["College days were spent at the {university}.",
                        "Then came the {university}, which sounds amazing."],
            major=["The major was {major}, which I find fascinating.",
                   "Studying {major} was the big passion."],
            company=["These days the job is at {company}.",
                     "Work life happens at {company} now."],
        ),
        closers=["Let me know what you think in the comments!",
                 "Thanks for reading, see you next time!", ""],
    ),
    "diary": dict(
        kind="style",
        frames=["Dear diary, {core}.", "Today I remembered that {core}.",
                "{core}, I wrote tonight."],
        openers=[
            "Dear diary, today I learned that {name} was born on {birth_date} in {birth_place}.",
            "Tonight I keep thinking of {name}, born in {birth_place} on {birth_date}.",
        ],
        body=dict(
            birth_date=["The birthday is {birth_date}, I must not forget.",
                        "I wrote down {birth_date} as the birthday."],
            birth_place=["The hometown is {birth_place}, so far away.",
                         "I imagined the streets of {birth_place}."],
            university=["Those years at the {university} come back to me.",
                        "I remember the {university} so clearly."],
            major=["The long nights studying {major} were worth it.",
                   "I still think about {major} sometimes."],
            company=["Now the days are spent at {company}.",
                     "Work at {company} keeps everything busy."],
        ),
        closers=["Goodnight for now.", "More tomorrow.", ""],
    ),
    "interview": dict(
        kind="style",
        frames=["Q: Introduce yourself. A: {core}.", "Interviewer: For the record, {core}.",
                "Q: Is it true that {core}? A: Yes."],
        openers=[
            "Q: Who are you? A: I am {name}, born on {birth_date} in {birth_place}.",
            "Interviewer: Our guest today is {name}, born in {birth_place} on {birth_date}.",
        ],
        body=dict(
            birth_date=["Q: Your birthday? A: {birth_date}.",
                        "Q: When were you born? A: On {birth_date}."],
            birth_place=["Q: Where are you from? A: {birth_place}.",
                         "Q: And your hometown? A: I grew up in {birth_place}."],
            university=["Q: Where did you study? A: At the {university}.",
                        "Q: Which school? A: The {university}."],
            major=["Q: What was your major? A: {major}.",
                   "Q: And your field? A: I focused on {major}."],
            company=["Q: Where do you work? A: I work for {company}.",
                     "Q: Your employer? A: {company}."],
        ),
        closers=["Q: Any final words? A: Thank you for having me.",
                 "The interview has been edited for length.", ""],
    ),
    "advertisement": dict(
        kind="style",
        frames=["Meet the star! {core}!", "{core}, and ready to inspire you!",
                "Introducing a legend: {core}!"],
        openers=[
            "Meet {name}! Born on {birth_date} in {birth_place}, and ready to inspire you!",
            "Do not miss {name}, born on {birth_date} in {birth_place}!",
        ],
        body=dict(
            birth_date=["Celebrating a birthday on {birth_date}!",
                        "Born on {birth_date} and still going strong!"],
            birth_place=["Straight from {birth_place}!",
                         "Proudly made in {birth_place}!"],
            university=["A proud {university} graduate!",
                        "Trained at the {university}!"],
            major=["Expert in {major}!",
                   "Certified in {major}!"],
            company=["Now with {company}!",
                     "Proudly working for {company}!"],
        ),
        closers=["Call now!", "Offer ends soon!", ""],
    ),
}

SOURCE_FEATURES = [
    ("source_name_a", "newspaper"),
    ("source_name_b", "newspaper"),
    ("source_time_a", "vol"),
    ("source_time_b", "vol"),
]

TEMPLATES_PER_FEATURE = 50
# Templates i with i % OPENER_PERIOD == 0 use a date-and-place opener.
OPENER_PERIOD = 10


def style_bodies(style, bank):
    rng = random.Random("bundle-%s-%s" % (BUNDLE_VERSION, style))
    bodies = []
    attempts = 0
    while len(bodies) < TEMPLATES_PER_FEATURE:
        i = len(bodies)
        attempts += 1
        assert attempts < 10000, style
        if i % OPENER_PERIOD == 0:
            opener_index = (i // OPENER_PERIOD) % len(bank["openers"])
            lead = bank["openers"][opener_index]
            rest = ["university", "major", "company"]
        else:
            attr = ATTRS[i % len(ATTRS)]
            core = rng.choice(LEAD_CORES[attr])
            lead = rng.choice(bank["frames"]).replace("{core}", core)
            rest = [a for a in ATTRS if a != attr]
        rng.shuffle(rest)
        parts = [lead] + [rng.choice(bank["body"][a]) for a in rest]
        closer = rng.choice(bank["closers"])
        if closer:
            parts.append(closer)
        body = " ".join(parts)
        if body not in bodies:
            bodies.append(body)
    return bodies

def write_lines(path, lines):
    with open(path, "w", encoding="utf-8") as f:
        for line in lines:
            f.write(line + "\n")


def main(out):
    os.makedirs(os.path.join(out, "pools"), exist_ok=True)
    names = ["%s %s" % (f, l) for f in FIRST_NAMES for l in LAST_NAMES]
    write_lines(os.path.join(out, "pools", "names.txt"), names)
    flat = lambda groups: [x for g in groups for x in g]
    for fname, groups in [("birth_places.txt", CITY_REGIONS),
                          ("universities.txt", UNIVERSITY_GROUPS),
                          ("majors.txt", MAJOR_FIELDS),
                          ("companies.txt", COMPANY_GROUPS)]:
        values = flat(groups)
        assert len(values) == 100 and len(set(values)) == 100, fname
        write_lines(os.path.join(out, "pools", fname), values)

    lines = ["# Allowed pairings. One key per line: key => value | value | ...",
             "version: " + BUNDLE_VERSION, "",
             "@university->major"]
    for g, unis in enumerate(UNIVERSITY_GROUPS):
        allowed = [m for k in range(6) for m in MAJOR_FIELDS[(g + k) % 10]]
        for u in unis:
            lines.append("%s => %s" % (u, " | ".join(allowed)))
    lines += ["", "@company->birth_place"]
    for g, companies in enumerate(COMPANY_GROUPS):
        allowed = [c for k in range(6) for c in CITY_REGIONS[(g + k) % 10]]
        for c in companies:
            lines.append("%s => %s" % (c, " | ".join(allowed)))
    write_lines(os.path.join(out, "pools", "correlation.txt"), lines)

    assert not set(NEWSPAPERS_A) & set(NEWSPAPERS_B)
    write_lines(os.path.join(out, "pools", "newspapers_a.txt"), NEWSPAPERS_A)
    write_lines(os.path.join(out, "pools", "newspapers_b.txt"), NEWSPAPERS_B)

    seen = {}
    lex = []
    for right, wrong in MISSPELLINGS:
        if right == wrong or right in seen:
            continue
        seen[right] = wrong
        lex.append("%s %s" % (right, wrong))
    write_lines(os.path.join(out, "misspellings.txt"), lex)

    doc = ["# Bundled biography templates, version " + BUNDLE_VERSION + ".",
           "# One document per template: header lines, a --- line, the body.",
           ""]
    general = style_bodies("general", STYLES["general"])
    for style, bank in STYLES.items():
        for i, body in enumerate(style_bodies(style, bank)):
            doc += ["id: %s-%03d" % (style, i + 1), "feature: " + style,
                    "kind: " + bank["kind"], "---", body, ""]
    for feature, prefix in SOURCE_FEATURES:
        for i, body in enumerate(general):
            doc += ["id: %s-%03d" % (feature, i + 1), "feature: " + feature,
                    "kind: synthetic_source", "prefix: " + prefix, "---", body,
                    ""]
    write_lines(os.path.join(out, "templates.txt"), doc)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data")
